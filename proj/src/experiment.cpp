#include "replboost/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "replboost/domain_io.hpp"
#include "replboost/harness.hpp"
#include "replboost/rboost_star.hpp"
#include "replboost/rmetaboost.hpp"

namespace replboost {

using nlohmann::json;
namespace fs = std::filesystem;

void ExperimentConfig::validate() const {
  if (algorithm != "rboost-star" && algorithm != "rmetaboost") {
    throw Error(ErrorKind::kConfiguration, "unknown algorithm '" + algorithm + "'");
  }
  if (learner != "oracle" && learner != "replicable") {
    throw Error(ErrorKind::kConfiguration, "unknown learner '" + learner + "'");
  }
  if (grid_resolution < 1) throw Error(ErrorKind::kConfiguration, "grid resolution must be >= 1");
  if (trials < 1) throw Error(ErrorKind::kConfiguration, "trials must be >= 1");
  if (jobs < 1) throw Error(ErrorKind::kConfiguration, "jobs must be >= 1");
  if (domain_path.empty()) throw Error(ErrorKind::kConfiguration, "no domain file given");
  if (output_dir.empty()) throw Error(ErrorKind::kConfiguration, "no output directory given");
  boost.validate();
}

json to_json(const ExperimentConfig& cfg) {
  json j = to_json(cfg.boost);
  j["algorithm"] = cfg.algorithm;
  j["learner"] = cfg.learner;
  j["grid_resolution"] = cfg.grid_resolution;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["domain"] = cfg.domain_path;
  return j;
}

void apply_config_json(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kConfiguration, "config must be a flat JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "algorithm") cfg.algorithm = v.get<std::string>();
      else if (key == "learner") cfg.learner = v.get<std::string>();
      else if (key == "mode") cfg.boost.mode = parse_mode(v.get<std::string>());
      else if (key == "rho") cfg.boost.rho = v.get<double>();
      else if (key == "eps") cfg.boost.eps = v.get<double>();
      else if (key == "gamma") cfg.boost.gamma = v.get<double>();
      else if (key == "eps0") cfg.boost.eps0 = v.get<double>();
      else if (key == "c_threshold") cfg.boost.c_threshold = v.get<double>();
      else if (key == "rejection_factor") cfg.boost.rejection_factor = v.get<double>();
      else if (key == "c0") cfg.boost.c0 = v.get<double>();
      else if (key == "budget_scale") cfg.boost.budget_scale = v.get<double>();
      else if (key == "sample_cap") cfg.boost.sample_cap = v.get<std::uint64_t>();
      else if (key == "grid_resolution") cfg.grid_resolution = v.get<std::size_t>();
      else if (key == "trials") cfg.trials = v.get<std::uint64_t>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "domain") cfg.domain_path = v.get<std::string>();
      else if (key == "output_dir") cfg.output_dir = v.get<std::string>();
      else if (key == "jobs") cfg.jobs = v.get<unsigned>();
      else throw Error(ErrorKind::kConfiguration, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, std::string("bad config value: ") + e.what());
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kConfiguration, "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfiguration, "'" + path + "' is not valid JSON: " + e.what());
  }
  apply_config_json(cfg, j);
}

std::shared_ptr<const WeakLearner> make_learner(const std::string& kind, const Problem& problem,
                                                std::size_t resolution, const BoostConfig& boost) {
  auto table = std::make_shared<const StumpTable>(problem, StumpGrid(*problem.domain, resolution));
  if (kind == "oracle") return std::make_shared<OracleStumpLearner>(table, boost.gamma);
  if (kind == "replicable") {
    return std::make_shared<ReplicableStumpLearner>(table, boost.gamma, boost.budget_scale,
                                                    boost.sample_cap);
  }
  throw Error(ErrorKind::kConfiguration, "unknown learner '" + kind + "'");
}

TrialOutcome run_trial(const std::string& algorithm, const Problem& problem,
                       const WeakLearner& learner, const BoostConfig& boost,
                       std::uint64_t root_seed, std::uint64_t data_seed) {
  TrialOutcome out;
  const RandomTape tape(root_seed);
  try {
    if (algorithm == "rboost-star") {
      const auto plan = plan_rboost_star(boost, learner);
      Sample sample = Sample::iid(problem.dist, data_seed, plan.budget.total);
      out.report = rboost_star(problem, &sample, learner, boost, tape);
    } else {
      const auto plan = plan_rmetaboost(boost, learner);
      Sample sample = Sample::iid(problem.dist, data_seed, plan.budget.total);
      out.report = rmetaboost(problem, sample, learner, boost, tape);
    }
    out.ok = true;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kConfiguration) throw;
    out.error_kind = std::string(to_string(e.kind()));
    out.message = e.what();
  }
  return out;
}

std::string summary_header() { return "trial,error,iterations,wl_calls,failed,agreement_key\n"; }

std::string summary_row(std::uint64_t trial, const TrialOutcome& o) {
  char buf[256];
  if (!o.ok) {
    std::snprintf(buf, sizeof buf, "%llu,,0,0,1,%s\n", static_cast<unsigned long long>(trial),
                  o.error_kind.c_str());
    return buf;
  }
  const RunReport& r = o.report;
  std::snprintf(buf, sizeof buf, "%llu,%.17g,%zu,%llu,%d,%s\n",
                static_cast<unsigned long long>(trial), r.exact_error, r.iterations.size(),
                static_cast<unsigned long long>(r.wl_calls), r.any_threshold_failure() ? 1 : 0,
                agreement_key(r).c_str());
  return buf;
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kConfiguration, "cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  std::optional<Problem> problem;
  std::shared_ptr<const WeakLearner> learner;
  try {
    cfg.validate();
    if (!fs::exists(cfg.domain_path)) {
      throw Error(ErrorKind::kConfiguration, "domain file '" + cfg.domain_path + "' not found");
    }
    problem.emplace(load_problem(cfg.domain_path));
    learner = make_learner(cfg.learner, *problem, cfg.grid_resolution, cfg.boost);
    if (cfg.algorithm == "rboost-star") {
      plan_rboost_star(cfg.boost, *learner);
    } else {
      plan_rmetaboost(cfg.boost, *learner);
    }
    fs::create_directories(cfg.output_dir);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }

  const fs::path dir(cfg.output_dir);
  const json cfg_json = to_json(cfg);
  const std::string cfg_text = cfg_json.dump();
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg_text)));
  json manifest = {{"tool", "replboost"},
                   {"version", kToolVersion},
                   {"root_seed", cfg.seed},
                   {"config", cfg_json},
                   {"config_hash", hash},
                   {"status", "incomplete"}};
  try {
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");

    std::vector<TrialOutcome> outcomes(cfg.trials);
    parallel_for(cfg.trials, cfg.jobs, [&](std::size_t i) {
      const std::uint64_t root = trial_seed(cfg.seed, i);
      outcomes[i] = run_trial(cfg.algorithm, *problem, *learner, cfg.boost, root, data_seed(root, 0));
    });

    std::string csv = summary_header();
    json files = json::array();
    std::uint64_t failures = 0;
    for (std::uint64_t i = 0; i < cfg.trials; ++i) {
      const auto& o = outcomes[i];
      csv += summary_row(i, o);
      char name[32];
      std::snprintf(name, sizeof name, "trial_%04llu.json", static_cast<unsigned long long>(i));
      json j;
      if (o.ok) {
        j = to_json(o.report);
      } else {
        ++failures;
        const std::uint64_t root = trial_seed(cfg.seed, i);
        j = {{"root_seed", root}, {"error", o.error_kind}, {"message", o.message}};
      }
      j["trial"] = i;
      write_file(dir / name, j.dump(2) + "\n");
      files.push_back(name);
    }
    write_file(dir / "summary.csv", csv);
    files.push_back("summary.csv");
    manifest["files"] = std::move(files);
    manifest["failed_trials"] = failures;
    manifest["status"] = "complete";
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    log << "wrote " << cfg.trials << " trial(s) to " << dir.string() << " (" << failures
        << " failed)\n";
  } catch (const Error& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    log << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace replboost
