#include "replboost/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "replboost/domain_io.hpp"
#include "replboost/experiment.hpp"
#include "replboost/harness.hpp"
#include "replboost/rboost_star.hpp"
#include "replboost/rmetaboost.hpp"
#include "replboost/rthreshold.hpp"
#include "replboost/sampling.hpp"

namespace replboost {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

json rate_json(const RateEstimate& r) {
  return {{"successes", r.successes}, {"trials", r.trials}, {"rate", r.rate},
          {"ci_lo", r.lo}, {"ci_hi", r.hi}};
}

const ThresholdParams kThreshold{0.1, 0.5, 0.05};

PointFunction indicator_of_one() {
  return [](PointId x) { return x == 1 ? 1.0 : 0.0; };
}

ThresholdOutcome bernoulli_threshold(const Problem& p, std::uint64_t m, const RandomTape& tape,
                                     std::uint64_t seed) {
  Sample s = Sample::iid(p.dist, seed, m);
  return rthreshold(s, kThreshold.z, indicator_of_one(), tape, m);
}

CriterionResult threshold_correctness(const AcceptanceOptions& opt) {
  const auto start = Clock::now();
  CriterionResult r{1, "rThreshold correctness", false, "", 0.0, {}};
  // ceil(700 ln 20 / 0.025) = 83881; the run uses the stated 83887 samples,
  // which meets the requirement.
  const std::uint64_t required = threshold_sample_size(kThreshold, 1.0);
  const std::uint64_t m = 83887;
  const std::uint64_t trials = 500;
  auto frequency = [&](double mean, int want, std::uint64_t salt) {
    const Problem p = bernoulli_problem(mean);
    std::vector<int> hits(trials, 0);
    parallel_for(trials, opt.jobs, [&](std::size_t i) {
      const std::uint64_t root = trial_seed(opt.seed + salt, i);
      hits[i] = bernoulli_threshold(p, m, RandomTape(root), data_seed(root, 0)).bit == want;
    });
    return wilson_interval(std::count(hits.begin(), hits.end(), 1), trials);
  };
  const RateEstimate low = frequency(0.05, 0, 11);
  const RateEstimate high = frequency(0.2, 1, 12);
  r.seconds = since(start);
  r.passed = required == 83881 && required <= m && low.meets(0.95) && high.meets(0.95) && r.seconds <= 120.0;
  r.detail = fmt("m=%llu (formula %llu); P[b=0 | mean 0.05]=%.3f; P[b=1 | mean 0.2]=%.3f (need >= 0.95 - CI)",
                 static_cast<unsigned long long>(m), static_cast<unsigned long long>(required),
                 low.rate, high.rate);
  r.data = {{"m", m}, {"required", required}, {"low", rate_json(low)}, {"high", rate_json(high)}};
  return r;
}

CriterionResult threshold_replicability(const AcceptanceOptions& opt) {
  const auto start = Clock::now();
  CriterionResult r{2, "rThreshold replicability", false, "", 0.0, {}};
  const std::uint64_t m = 83887;
  const Problem p = bernoulli_problem(kThreshold.z);
  const PairedRun run = [&](const RandomTape& tape, std::uint64_t seed) {
    RunOutcome o;
    o.root_seed = tape.root_seed();
    o.ok = true;
    o.key = std::to_string(bernoulli_threshold(p, m, tape, seed).bit);
    return o;
  };
  const auto est = estimate_replicability(run, 500, opt.seed + 21, opt.jobs);
  r.seconds = since(start);
  r.passed = est.rate.meets(1.0 - kThreshold.rho) && r.seconds <= 240.0;
  r.detail = fmt("agreement %.3f over %llu pairs at mean = z (need >= 0.5 - CI %.3f)",
                 est.rate.rate, static_cast<unsigned long long>(est.rate.trials),
                 est.rate.half_width());
  r.data = {{"agreement", rate_json(est.rate)}, {"both_failed", est.both_failed}};
  return r;
}

CriterionResult rejection_fidelity(const AcceptanceOptions& opt) {
  const auto start = Clock::now();
  CriterionResult r{3, "rejection sampler fidelity", false, "", 0.0, {}};
  constexpr std::size_t n = 16;
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 + static_cast<double>(i % 5);
  const FiniteDistribution dist = FiniteDistribution::from_weights(w);
  const PointFunction mu = [](PointId x) {
    return 0.1 + 0.9 * static_cast<double>((x * 7) % 16) / 15.0;
  };
  const FiniteDistribution exact = reweighted_distribution(mu, dist);
  const std::uint64_t target = 100000;
  const std::uint64_t input =
      rejection_input_size(target, density(mu, dist), 1e-6, 1.0);
  const RandomTape tape(trial_seed(opt.seed, 31));

  Sample s = Sample::iid(dist, data_seed(tape.root_seed(), 0), input);
  Sample out = rejection_sample(s, target, mu, tape.derive("reject", 0));
  const double tv = tv_distance(empirical_distribution(out.histogram(n)), exact);

  // mu = 1 must return the first m_target inputs verbatim.
  const std::uint64_t id_target = 1000;
  Sample a = Sample::iid(dist, data_seed(tape.root_seed(), 1), 4 * id_target);
  Sample b = Sample::iid(dist, data_seed(tape.root_seed(), 1), 4 * id_target);
  Sample accepted =
      rejection_sample(a, id_target, [](PointId) { return 1.0; }, tape.derive("reject", 1));
  const auto got = accepted.drain();
  std::vector<PointId> want;
  for (std::uint64_t i = 0; i < id_target; ++i) want.push_back(b.next());
  const bool identity = got == want && a.consumed() == id_target;

  r.seconds = since(start);
  r.passed = tv <= 0.05 && identity && r.seconds <= 30.0;
  r.detail = fmt("TV(empirical, D_mu) = %.4f over %llu draws (need <= 0.05); accept-all identity %s",
                 tv, static_cast<unsigned long long>(target), identity ? "exact" : "BROKEN");
  r.data = {{"tv", tv}, {"draws", target}, {"identity", identity}};
  return r;
}

struct BoostTraces {
  std::vector<TrialOutcome> runs;
  std::vector<Problem> problems;
  double seconds = 0.0;
};

Problem margin_problem(std::uint64_t seed) {
  MarginDomainSpec spec;
  spec.size = 64;
  spec.margin = 0.1;
  spec.seed = seed;
  return generate_margin_domain(spec);
}

BoostTraces run_boost_trials(const AcceptanceOptions& opt, const std::string& algorithm,
                             const BoostConfig& cfg, std::uint64_t salt, std::size_t trials) {
  const auto start = Clock::now();
  BoostTraces out;
  for (std::size_t i = 0; i < trials; ++i) {
    out.problems.push_back(margin_problem(trial_seed(opt.seed + salt, i)));
  }
  out.runs.resize(trials);
  parallel_for(trials, opt.jobs, [&](std::size_t i) {
    const auto learner = make_learner("oracle", out.problems[i], StumpGrid::kDefaultResolution, cfg);
    const std::uint64_t root = trial_seed(opt.seed + salt + 1, i);
    out.runs[i] = run_trial(algorithm, out.problems[i], *learner, cfg, root, data_seed(root, 0));
  });
  out.seconds = since(start);
  return out;
}

BoostConfig rboost_config() {
  BoostConfig cfg;
  cfg.rho = 0.5;
  cfg.eps = 1.0 / 16.0;
  cfg.gamma = 0.1;
  cfg.mode = Mode::kExact;
  return cfg;
}

CriterionResult rboost_correctness(const BoostTraces& traces) {
  CriterionResult r{4, "rBoost* correctness", false, "", traces.seconds, {}};
  const BoostConfig cfg = rboost_config();
  const auto cap = static_cast<std::uint64_t>(std::ceil(16.0 / (cfg.eps * cfg.gamma * cfg.gamma)));
  std::uint64_t good = 0;
  std::uint64_t errors = 0;
  std::uint64_t over_cap = 0;
  std::size_t max_iter = 0;
  double worst = 0.0;
  for (const auto& o : traces.runs) {
    if (!o.ok) {
      ++errors;
      continue;
    }
    if (o.report.exact_error <= cfg.eps) ++good;
    worst = std::max(worst, o.report.exact_error);
    max_iter = std::max(max_iter, o.report.iterations.size());
    if (o.report.iterations.size() > cap) ++over_cap;
  }
  const std::size_t n = traces.runs.size();
  r.passed = good * 100 >= 95 * n && over_cap == 0 && errors == 0 && r.seconds <= 120.0;
  r.detail = fmt("%llu/%zu trials with er_D(H) <= 1/16 (need >= 95%%); max iterations %zu <= %llu; "
                 "%llu errors; worst error %.4f",
                 static_cast<unsigned long long>(good), n, max_iter,
                 static_cast<unsigned long long>(cap), static_cast<unsigned long long>(errors),
                 worst);
  r.data = {{"good", good}, {"trials", n}, {"max_iterations", max_iter}, {"cap", cap},
            {"errors", errors}, {"worst_error", worst}};
  return r;
}

CriterionResult scaled_measures(const BoostTraces& traces) {
  const auto start = Clock::now();
  CriterionResult r{5, "scaled-measures invariant", false, "", 0.0, {}};
  std::uint64_t checked = 0;
  std::uint64_t violations = 0;
  std::uint64_t audited = 0;
  std::string first;
  for (const auto& o : traces.runs) {
    if (!o.ok) continue;
    ++audited;
    const DensityAudit a = density_audit(o.report);
    checked += a.checked;
    violations += a.violations.size();
    if (first.empty() && !a.violations.empty()) first = a.violations.front();
  }
  r.seconds = since(start);
  r.passed = violations == 0 && audited == traces.runs.size() && audited > 0;
  r.detail = fmt("%llu halving checks over %llu traces, %llu violations%s%s",
                 static_cast<unsigned long long>(checked), static_cast<unsigned long long>(audited),
                 static_cast<unsigned long long>(violations), first.empty() ? "" : "; first: ",
                 first.c_str());
  r.data = {{"checked", checked}, {"traces", audited}, {"violations", violations}};
  return r;
}

BoostConfig meta_config() {
  BoostConfig cfg;
  cfg.rho = 0.5;
  cfg.eps = 0.1;
  cfg.gamma = 0.1;
  cfg.mode = Mode::kExact;
  // Outer threshold checks only; about 1.6e5 samples each.
  cfg.budget_scale = 1e-5;
  return cfg;
}

CriterionResult meta_correctness(const BoostTraces& traces) {
  CriterionResult r{6, "rMetaBoost correctness", false, "", traces.seconds, {}};
  const BoostConfig cfg = meta_config();
  const std::uint64_t T = compute_T(cfg.eps);
  BoostConfig inner = cfg;
  inner.eps = cfg.eps0;
  inner.rho = cfg.rho / (6.0 * static_cast<double>(T));
  const auto inner_cap =
      static_cast<std::uint64_t>(std::ceil(inner.c0 / (inner.eps * inner.gamma * inner.gamma)));
  std::uint64_t good = 0;
  std::uint64_t errors = 0;
  std::uint64_t over = 0;
  std::uint64_t max_calls = 0;
  std::string first_error;
  for (const auto& o : traces.runs) {
    if (!o.ok) {
      ++errors;
      if (first_error.empty()) first_error = o.message;
      continue;
    }
    if (o.report.exact_error <= cfg.eps) ++good;
    max_calls = std::max(max_calls, o.report.wl_calls);
    if (o.report.wl_calls > T * inner_cap) ++over;
  }
  const auto est = wilson_interval(good, traces.runs.size());
  r.passed = T == 24 && est.meets(1.0 - cfg.rho) && over == 0 && r.seconds <= 300.0;
  r.detail = fmt("T=%llu; %llu/%zu trials with er_D(H) <= 0.1 (need >= 0.5 - CI); max wl calls "
                 "%llu <= %llu; %llu errors%s%s",
                 static_cast<unsigned long long>(T), static_cast<unsigned long long>(good),
                 traces.runs.size(), static_cast<unsigned long long>(max_calls),
                 static_cast<unsigned long long>(T * inner_cap),
                 static_cast<unsigned long long>(errors), first_error.empty() ? "" : ": ",
                 first_error.c_str());
  r.data = {{"T", T}, {"good", rate_json(est)}, {"max_wl_calls", max_calls},
            {"wl_cap", T * inner_cap}, {"errors", errors}};
  return r;
}

CriterionResult high_density(const BoostTraces& traces) {
  const auto start = Clock::now();
  CriterionResult r{7, "high-density invariant", false, "", 0.0, {}};
  std::uint64_t checked = 0;
  std::uint64_t excluded = 0;
  std::uint64_t violations = 0;
  double min_density = 1.0;
  for (const auto& o : traces.runs) {
    if (!o.ok) continue;
    const DensityAudit a = density_audit(o.report);
    checked += a.checked;
    excluded += a.excluded;
    violations += a.violations.size();
    for (std::size_t k = 0; k < a.checked; ++k) {
      min_density = std::min(min_density, o.report.iterations[k].density);
    }
  }
  r.seconds = since(start);
  r.passed = violations == 0 && checked > 0;
  r.detail = fmt("%llu outer iterations checked (%llu excluded after a threshold failure); "
                 "min d(mu_t) = %.5f >= 0.003125; %llu violations",
                 static_cast<unsigned long long>(checked), static_cast<unsigned long long>(excluded),
                 min_density, static_cast<unsigned long long>(violations));
  r.data = {{"checked", checked}, {"excluded", excluded}, {"min_density", min_density},
            {"violations", violations}};
  return r;
}

CriterionResult exp_weight(const BoostTraces& traces) {
  const auto start = Clock::now();
  CriterionResult r{8, "exponential-weight audit", false, "", 0.0, {}};
  std::uint64_t eligible = 0;
  std::uint64_t excluded = 0;
  std::uint64_t violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < traces.runs.size(); ++i) {
    const auto& o = traces.runs[i];
    if (!o.ok) continue;
    try {
      const ExpWeightAudit a = exp_weight_audit(o.report, traces.problems[i], o.report.config.eps0);
      ++eligible;
      worst = std::max(worst, a.value);
      if (!a.passed || a.value > std::exp(3.0) * (1.0 + 1e-9)) ++violations;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kPreconditionUnmet) throw;
      ++excluded;
    }
  }
  r.seconds = since(start);
  r.passed = violations == 0 && eligible > 0;
  r.detail = fmt("%llu eligible runs (%llu excluded), max E[exp(M_{T+1})] = %.4f <= e^3 = %.4f; "
                 "%llu violations",
                 static_cast<unsigned long long>(eligible), static_cast<unsigned long long>(excluded),
                 worst, std::exp(3.0), static_cast<unsigned long long>(violations));
  r.data = {{"eligible", eligible}, {"excluded", excluded}, {"max_value", worst},
            {"violations", violations}};
  return r;
}

// Sampled-mode pipeline settings for the replicability smoke test.
struct SmokeSetup {
  BoostConfig cfg;
  MarginDomainSpec domain;
};

SmokeSetup smoke_setup(std::uint64_t seed) {
  SmokeSetup s;
  s.cfg.rho = 0.5;
  s.cfg.eps = 0.25;
  s.cfg.gamma = 0.2;
  s.cfg.mode = Mode::kSampled;
  s.cfg.budget_scale = 1.0;
  s.cfg.sample_cap = 2000;
  s.domain.size = 8;
  s.domain.dimension = 2;
  s.domain.stumps = 3;
  s.domain.margin = 0.2;
  s.domain.seed = seed;
  return s;
}

CriterionResult end_to_end_replicability(const AcceptanceOptions& opt) {
  const auto start = Clock::now();
  CriterionResult r{9, "end-to-end replicability", false, "", 0.0, {}};
  const SmokeSetup setup = smoke_setup(trial_seed(opt.seed, 91));
  const Problem problem = generate_margin_domain(setup.domain);
  const auto learner = make_learner("replicable", problem, StumpGrid::kDefaultResolution, setup.cfg);
  std::vector<double> pair_seconds;
  std::mutex mutex;
  const PairedRun run = [&](const RandomTape& tape, std::uint64_t seed) {
    const TrialOutcome t =
        run_trial("rmetaboost", problem, *learner, setup.cfg, tape.root_seed(), seed);
    RunOutcome o;
    o.ok = t.ok;
    o.key = t.ok ? t.report.output_key() : "";
    o.error = t.error_kind;
    o.message = t.message;
    return o;
  };
  const PairedRun timed = [&](const RandomTape& tape, std::uint64_t seed) {
    const auto t0 = Clock::now();
    RunOutcome o = run(tape, seed);
    const double s = since(t0);
    std::lock_guard lock(mutex);
    pair_seconds.push_back(s);
    return o;
  };
  const auto est = estimate_replicability(timed, 100, opt.seed + 92, opt.jobs);
  // Two runs per pair; pair time is the sum of its two runs.
  double max_run = 0.0;
  for (double s : pair_seconds) max_run = std::max(max_run, s);
  std::uint64_t failed_runs = 0;
  for (const auto& p : est.results) failed_runs += !p.first.ok + !p.second.ok;
  r.seconds = since(start);
  r.passed = est.rate.meets(0.5) && 2.0 * max_run <= 5.0;
  r.detail = fmt("agreement %.3f over %llu pairs (need >= 0.5 - CI %.3f); %llu both-failed; "
                 "%llu failed runs; slowest run %.2fs",
                 est.rate.rate, static_cast<unsigned long long>(est.rate.trials),
                 est.rate.half_width(), static_cast<unsigned long long>(est.both_failed),
                 static_cast<unsigned long long>(failed_runs), max_run);
  r.data = {{"agreement", rate_json(est.rate)}, {"both_failed", est.both_failed},
            {"failed_runs", failed_runs}, {"slowest_run_seconds", max_run}};
  return r;
}

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

CriterionResult determinism(const AcceptanceOptions& opt) {
  const auto start = Clock::now();
  CriterionResult r{10, "determinism", false, "", 0.0, {}};
  const fs::path base =
      (opt.scratch_dir.empty() ? fs::temp_directory_path() : fs::path(opt.scratch_dir)) /
      ("replboost-determinism-" + std::to_string(opt.seed));
  fs::remove_all(base);
  fs::create_directories(base);

  const SmokeSetup setup = smoke_setup(trial_seed(opt.seed, 101));
  save_problem(generate_margin_domain(setup.domain), (base / "small.json").string());
  save_problem(margin_problem(trial_seed(opt.seed, 102)), (base / "margin.json").string());

  struct Case {
    std::string name;
    ExperimentConfig cfg;
  };
  std::vector<Case> cases;
  {
    ExperimentConfig c;
    c.algorithm = "rmetaboost";
    c.learner = "replicable";
    c.boost = setup.cfg;
    c.trials = 4;
    c.domain_path = (base / "small.json").string();
    cases.push_back({"rmetaboost-sampled", c});
  }
  {
    ExperimentConfig c;
    c.algorithm = "rboost-star";
    c.learner = "oracle";
    c.boost = rboost_config();
    c.boost.mode = Mode::kSampled;
    c.boost.sample_cap = 20000;
    c.trials = 4;
    c.domain_path = (base / "margin.json").string();
    cases.push_back({"rboost-star-sampled", c});
  }

  bool all_same = true;
  std::ostringstream log;
  json data = json::array();
  for (auto& c : cases) {
    std::string first;
    bool same = true;
    int code = 0;
    for (unsigned rep = 0; rep < 3; ++rep) {
      c.cfg.output_dir = (base / (c.name + "-" + std::to_string(rep))).string();
      c.cfg.jobs = rep == 2 ? std::max(2u, opt.jobs) : 1u;
      code |= run_experiment(c.cfg, log);
      const std::string csv = read_bytes(fs::path(c.cfg.output_dir) / "summary.csv");
      if (rep == 0) first = csv;
      same = same && code == 0 && !csv.empty() && csv == first;
    }
    all_same = all_same && same;
    data.push_back({{"case", c.name}, {"identical", same}, {"exit", code}});
  }
  fs::remove_all(base);
  r.seconds = since(start);
  r.passed = all_same;
  r.detail = all_same ? "summary CSVs byte-identical across 3 reruns (serial and parallel)"
                      : "summary CSVs differ across reruns: " + log.str();
  r.data = data;
  return r;
}

}  // namespace

std::vector<int> suite_criteria(const std::string& suite) {
  if (suite == "threshold") return {1, 2};
  if (suite == "rejection") return {3};
  if (suite == "rboost-star") return {4, 5};
  if (suite == "rmetaboost") return {6, 7, 8};
  if (suite == "replicability") return {9};
  if (suite == "determinism") return {10};
  if (suite == "all") return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  throw Error(ErrorKind::kConfiguration, "unknown suite '" + suite + "'");
}

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& options, const std::function<void(const CriterionResult&)>& on_result) {
  std::set<int> want(options.criteria.begin(), options.criteria.end());
  if (want.empty()) want = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<CriterionResult> results;
  auto emit = [&](CriterionResult r) {
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  };
  if (want.count(1)) emit(threshold_correctness(options));
  if (want.count(2)) emit(threshold_replicability(options));
  if (want.count(3)) emit(rejection_fidelity(options));
  if (want.count(4) || want.count(5)) {
    const BoostTraces traces = run_boost_trials(options, "rboost-star", rboost_config(), 41, 100);
    if (want.count(4)) emit(rboost_correctness(traces));
    if (want.count(5)) emit(scaled_measures(traces));
  }
  if (want.count(6) || want.count(7) || want.count(8)) {
    const BoostTraces traces = run_boost_trials(options, "rmetaboost", meta_config(), 61, 100);
    if (want.count(6)) emit(meta_correctness(traces));
    if (want.count(7)) emit(high_density(traces));
    if (want.count(8)) emit(exp_weight(traces));
  }
  if (want.count(9)) emit(end_to_end_replicability(options));
  if (want.count(10)) emit(determinism(options));
  return results;
}

json to_json(const CriterionResult& r) {
  return {{"id", r.id},           {"name", r.name},       {"passed", r.passed},
          {"detail", r.detail},   {"seconds", r.seconds}, {"data", r.data}};
}

}  // namespace replboost
