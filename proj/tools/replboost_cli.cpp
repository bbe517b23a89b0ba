// replboost: command-line front end for the replicable boosting library.
//
// Exit codes: 0 success, 1 verification failure, 2 usage or input error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "replboost/acceptance.hpp"
#include "replboost/domain_io.hpp"
#include "replboost/experiment.hpp"
#include "replboost/harness.hpp"
#include "replboost/rthreshold.hpp"

namespace fs = std::filesystem;
using namespace replboost;

namespace {

constexpr int kUsageError = 2;

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

struct BoostFlags {
  ExperimentConfig cfg;
  std::string config_file;
  std::string mode = "sampled";
};

// Flags registered with a default of "unset" so that only explicitly given
// flags override values from --config.
void add_boost_flags(CLI::App* sub, BoostFlags& f) {
  sub->add_option("--config", f.config_file, "Flat JSON config file (flags override it)");
  sub->add_option("--rho", f.cfg.boost.rho, "Replicability parameter rho in (0,1)");
  sub->add_option("--eps", f.cfg.boost.eps, "Target error eps in (0,1)");
  sub->add_option("--gamma", f.cfg.boost.gamma, "Weak-learner advantage gamma in (0,1/2)");
  sub->add_option("--eps0", f.cfg.boost.eps0, "Inner error of the meta booster");
  sub->add_option("--c0", f.cfg.boost.c0, "rBoost* round-cap constant");
  sub->add_option("--seed", f.cfg.seed, "Root seed");
  sub->add_option("--domain", f.cfg.domain_path, "Domain JSON file");
  sub->add_option("--mode", f.mode, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));
  sub->add_option("--budget-scale", f.cfg.boost.budget_scale, "Multiplier on sample-size formulas");
  sub->add_option("--sample-cap", f.cfg.boost.sample_cap,
                  "Cap on samples per threshold check or weak-learner call (0 = none)");
  sub->add_option("--learner", f.cfg.learner, "oracle or replicable")
      ->check(CLI::IsMember({"oracle", "replicable"}));
  sub->add_option("--grid", f.cfg.grid_resolution, "Stump thresholds per feature");
  sub->add_option("--trials", f.cfg.trials, "Independent trials");
  sub->add_option("--out", f.cfg.output_dir, "Output directory");
  sub->add_option("--jobs", f.cfg.jobs, "Worker threads");
}

// Rebuilds the config as defaults < file < explicitly given flags.
ExperimentConfig resolve(CLI::App* sub, const BoostFlags& flags, const std::string& algorithm) {
  ExperimentConfig cfg;
  cfg.algorithm = algorithm;
  if (!flags.config_file.empty()) apply_config_file(cfg, flags.config_file);
  cfg.algorithm = algorithm;
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  const ExperimentConfig& f = flags.cfg;
  if (given("--rho")) cfg.boost.rho = f.boost.rho;
  if (given("--eps")) cfg.boost.eps = f.boost.eps;
  if (given("--gamma")) cfg.boost.gamma = f.boost.gamma;
  if (given("--eps0")) cfg.boost.eps0 = f.boost.eps0;
  if (given("--c0")) cfg.boost.c0 = f.boost.c0;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--domain")) cfg.domain_path = f.domain_path;
  if (given("--mode")) cfg.boost.mode = parse_mode(flags.mode);
  if (given("--budget-scale")) cfg.boost.budget_scale = f.boost.budget_scale;
  if (given("--sample-cap")) cfg.boost.sample_cap = f.boost.sample_cap;
  if (given("--learner")) cfg.learner = f.learner;
  if (given("--grid")) cfg.grid_resolution = f.grid_resolution;
  if (given("--trials")) cfg.trials = f.trials;
  if (given("--out")) cfg.output_dir = f.output_dir;
  if (given("--jobs")) cfg.jobs = f.jobs;
  return cfg;
}

struct ThresholdFlags {
  double z = 0.1;
  double rho = 0.5;
  double delta = 0.05;
  double mean = 0.05;
  std::uint64_t trials = 100;
  std::uint64_t seed = 1;
  double scale = 1.0;
  std::string out;
};

int threshold_test(const ThresholdFlags& f) {
  const ThresholdParams p{f.z, f.rho, f.delta};
  p.validate();
  const std::uint64_t m = threshold_sample_size(p, f.scale);
  const Problem problem = bernoulli_problem(f.mean);
  const PointFunction phi = [](PointId x) { return x == 1 ? 1.0 : 0.0; };
  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out);
    if (!file) throw Error(ErrorKind::kConfiguration, "cannot write '" + f.out + "'");
  }
  std::ostream& os = f.out.empty() ? std::cout : file;
  os << "trial,b,phi_bar,z0\n";
  for (std::uint64_t i = 0; i < f.trials; ++i) {
    const std::uint64_t root = trial_seed(f.seed, i);
    Sample s = Sample::iid(problem.dist, data_seed(root, 0), m);
    const ThresholdOutcome o = rthreshold(s, f.z, phi, RandomTape(root), m);
    char row[128];
    std::snprintf(row, sizeof row, "%llu,%d,%.17g,%.17g\n", static_cast<unsigned long long>(i),
                  o.bit, o.phi_bar, o.cutoff);
    os << row;
  }
  return 0;
}

struct VerifyFlags {
  std::vector<std::string> suites{"all"};
  std::uint64_t seed = AcceptanceOptions{}.seed;
  unsigned jobs = default_jobs();
  std::string out;
};

int verify(const VerifyFlags& f) {
  AcceptanceOptions opt;
  opt.seed = f.seed;
  opt.jobs = f.jobs;
  std::vector<std::pair<std::string, std::vector<int>>> suites;
  for (const auto& s : f.suites) {
    if (s == "all") {
      for (const char* name :
           {"threshold", "rejection", "rboost-star", "rmetaboost", "replicability", "determinism"}) {
        suites.emplace_back(name, suite_criteria(name));
      }
    } else {
      suites.emplace_back(s, suite_criteria(s));
    }
  }
  if (!f.out.empty()) fs::create_directories(f.out);

  bool all_passed = true;
  nlohmann::json verdict = {{"seed", f.seed}, {"version", kToolVersion}};
  nlohmann::json suite_json = nlohmann::json::object();
  for (const auto& [name, ids] : suites) {
    opt.criteria = ids;
    opt.scratch_dir = f.out;
    const auto results = run_acceptance(opt, [](const CriterionResult& r) {
      std::printf("[%s] %2d %-28s %7.2fs  %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds, r.detail.c_str());
      std::fflush(stdout);
    });
    nlohmann::json arr = nlohmann::json::array();
    std::string csv = "criterion,name,passed,seconds\n";
    bool passed = true;
    for (const auto& r : results) {
      arr.push_back(to_json(r));
      passed = passed && r.passed;
      char row[160];
      std::snprintf(row, sizeof row, "%d,%s,%d,%.3f\n", r.id, r.name.c_str(), r.passed ? 1 : 0,
                    r.seconds);
      csv += row;
    }
    all_passed = all_passed && passed;
    suite_json[name] = {{"passed", passed}, {"criteria", arr}};
    if (!f.out.empty()) std::ofstream(fs::path(f.out) / (name + ".csv")) << csv;
  }
  verdict["suites"] = suite_json;
  verdict["passed"] = all_passed;
  if (!f.out.empty()) std::ofstream(fs::path(f.out) / "verdict.json") << verdict.dump(2) << '\n';
  std::printf("%s\n", all_passed ? "all criteria passed" : "some criteria FAILED");
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replicable boosting: rThreshold, rBoost*, rMetaBoost and verification suites"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  ThresholdFlags tf;
  auto* thr = app.add_subcommand("threshold-test", "Replicable threshold on a synthetic Bernoulli");
  thr->add_option("--z", tf.z, "Threshold z");
  thr->add_option("--rho", tf.rho, "Replicability rho");
  thr->add_option("--delta", tf.delta, "Failure probability delta <= rho/8");
  thr->add_option("--mean", tf.mean, "True mean of phi");
  thr->add_option("--trials", tf.trials, "Trials");
  thr->add_option("--seed", tf.seed, "Root seed");
  thr->add_option("--budget-scale", tf.scale, "Multiplier on the sample size");
  thr->add_option("--out", tf.out, "CSV output file (default stdout)");

  BoostFlags rb;
  auto* rbs = app.add_subcommand("rboost-star", "Run rBoost* trials on a domain");
  add_boost_flags(rbs, rb);
  BoostFlags mb;
  auto* rmb = app.add_subcommand("rmetaboost", "Run rMetaBoost trials on a domain");
  add_boost_flags(rmb, mb);

  VerifyFlags vf;
  auto* ver = app.add_subcommand("verify", "Run acceptance suites");
  ver->add_option("--suite", vf.suites,
                  "threshold, rejection, rboost-star, rmetaboost, replicability, determinism, all")
      ->check(CLI::IsMember({"threshold", "rejection", "rboost-star", "rmetaboost",
                             "replicability", "determinism", "all"}));
  ver->add_option("--seed", vf.seed, "Root seed");
  ver->add_option("--jobs", vf.jobs, "Worker threads");
  ver->add_option("--out", vf.out, "Directory for verdict.json and per-suite CSVs");

  MarginDomainSpec gs;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-domain", "Write a synthetic margin domain");
  gen->add_option("--size", gs.size, "Number of points");
  gen->add_option("--dim", gs.dimension, "Feature dimension");
  gen->add_option("--stumps", gs.stumps, "Hidden stumps in the labeling vote");
  gen->add_option("--margin", gs.margin, "Margin in (0, 1/2)");
  gen->add_option("--grid", gs.resolution, "Grid resolution of the hidden stumps");
  gen->add_option("--seed", gs.seed, "Generator seed");
  gen->add_option("--out", gen_out, "Output JSON file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (thr->parsed()) return threshold_test(tf);
    if (rbs->parsed()) return run_experiment(resolve(rbs, rb, "rboost-star"), std::cerr);
    if (rmb->parsed()) return run_experiment(resolve(rmb, mb, "rmetaboost"), std::cerr);
    if (ver->parsed()) return verify(vf);
    if (gen->parsed()) {
      const Problem p = generate_margin_domain(gs);
      if (gen_out.empty()) {
        std::cout << problem_to_json(p).dump(2) << '\n';
      } else {
        save_problem(p, gen_out);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return kUsageError;
}
