#include "replboost/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace replboost {

RateEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  RateEstimate r;
  r.successes = successes;
  r.trials = trials;
  if (trials == 0) return r;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  r.rate = p;
  r.lo = std::max(0.0, centre - half);
  r.hi = std::min(1.0, centre + half);
  return r;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  std::vector<std::exception_ptr> errors(n);
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i) {
  return mix64(mix64(seed) + 0x9e3779b97f4a7c15ULL * (i + 1));
}

std::uint64_t data_seed(std::uint64_t root_seed, std::uint64_t which) {
  return mix64(root_seed ^ mix64(0xda7a000000000000ULL + which));
}

PairedTrialResult make_pair(RunOutcome first, RunOutcome second) {
  if (first.root_seed != second.root_seed) {
    throw Error(ErrorKind::kConfiguration, "paired runs must share a root seed (" +
                                               std::to_string(first.root_seed) + " vs " +
                                               std::to_string(second.root_seed) + ")");
  }
  PairedTrialResult r;
  r.root_seed = first.root_seed;
  r.both_failed = !first.ok && !second.ok && first.error == second.error;
  r.agree = first.ok && second.ok && first.key == second.key;
  r.first = std::move(first);
  r.second = std::move(second);
  return r;
}

ReplicabilityEstimate estimate_replicability(const PairedRun& run, std::uint64_t pairs,
                                             std::uint64_t seed, unsigned jobs) {
  if (pairs < 30) throw Error(ErrorKind::kConfiguration, "replicability needs at least 30 pairs");
  ReplicabilityEstimate est;
  est.pairs = pairs;
  est.results.resize(pairs);
  parallel_for(pairs, jobs, [&](std::size_t i) {
    const std::uint64_t root = trial_seed(seed, i);
    const RandomTape tape(root);
    RunOutcome a = run(tape, data_seed(root, 0));
    RunOutcome b = run(tape, data_seed(root, 1));
    a.root_seed = root;
    b.root_seed = root;
    est.results[i] = make_pair(std::move(a), std::move(b));
  });
  std::uint64_t agree = 0;
  for (const auto& r : est.results) {
    if (r.both_failed) {
      ++est.both_failed;
    } else if (r.agree) {
      ++agree;
    }
  }
  est.rate = wilson_interval(agree, pairs - est.both_failed);
  return est;
}

ExpWeightAudit exp_weight_audit(const RunReport& report, const Problem& problem, double eps0) {
  const std::size_t T = report.iterations.size();
  if (report.votes.size() != T || (T > 0 && report.caps.size() != T + 1)) {
    throw Error(ErrorKind::kConfiguration, "exp-weight audit needs a complete rMetaBoost report");
  }
  for (const auto& rec : report.iterations) {
    if (!(rec.exact_error <= eps0)) {
      throw Error(ErrorKind::kPreconditionUnmet,
                  "inner hypothesis at t=" + std::to_string(rec.t) + " has error " +
                      std::to_string(rec.exact_error) + " > eps0");
    }
  }
  std::vector<double> terms(problem.size());
  for (PointId x = 0; x < problem.size(); ++x) {
    int m = 0;
    for (std::size_t t = 0; t < T; ++t) {
      const int n = m + (report.votes[t].predict(*problem.domain, x) != problem.target(x) ? 1 : 0);
      m = std::min(n, report.caps[t + 1]);
    }
    terms[x] = std::exp(static_cast<double>(m)) * problem.dist(x);
  }
  ExpWeightAudit audit;
  audit.value = detail::compensated_sum(terms);
  audit.bound = std::exp(2.0 * static_cast<double>(T) * eps0);
  audit.passed = audit.value <= audit.bound * (1.0 + 1e-9);
  return audit;
}

DensityAudit density_audit(const RunReport& report) {
  DensityAudit audit;
  auto violate = [&](std::string what) {
    audit.passed = false;
    audit.violations.push_back(std::move(what));
  };
  for (const auto& rec : report.iterations) {
    if (!(rec.density >= 0.0 && rec.density <= 1.0 + 1e-12)) {
      violate("t=" + std::to_string(rec.t) + ": density outside [0,1]");
    }
  }
  if (report.algorithm == "rmetaboost") {
    const double floor = report.config.eps / 32.0;
    bool failed = false;
    for (const auto& rec : report.iterations) {
      if (failed) {
        ++audit.excluded;
        continue;
      }
      ++audit.checked;
      if (rec.density < floor) {
        violate("t=" + std::to_string(rec.t) + ": d(mu_t) = " + std::to_string(rec.density) +
                " < eps/32");
      }
      failed = rec.threshold_failed;
    }
    return audit;
  }
  std::vector<double> d;
  for (const auto& rec : report.iterations) d.push_back(rec.density);
  d.push_back(report.final_density);
  const auto period = static_cast<std::size_t>(std::floor(1.0 / report.config.gamma));
  for (std::size_t t = 0; t < d.size(); ++t) {
    for (std::size_t k = 1; k <= period && t + k < d.size(); ++k) {
      ++audit.checked;
      if (d[t + k] < d[t] / 2.0) {
        violate("t=" + std::to_string(t + 1) + ", k=" + std::to_string(k) + ": " +
                std::to_string(d[t + k]) + " < " + std::to_string(d[t]) + "/2");
      }
    }
  }
  return audit;
}

double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q) {
  if (p.size() != q.size()) {
    throw Error(ErrorKind::kDomainMismatch, "distributions over domains of size " +
                                                std::to_string(p.size()) + " and " +
                                                std::to_string(q.size()));
  }
  std::vector<double> diffs(p.size());
  for (PointId i = 0; i < p.size(); ++i) diffs[i] = std::abs(p(i) - q(i));
  return 0.5 * detail::compensated_sum(diffs);
}

FiniteDistribution empirical_distribution(const std::vector<std::uint64_t>& counts) {
  std::vector<double> w(counts.begin(), counts.end());
  return FiniteDistribution::from_weights(w);
}

}  // namespace replboost
