#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"
#include "replboost/report.hpp"

namespace replboost {

struct RateEstimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double lo = 0.0;  // Wilson 95% interval
  double hi = 1.0;

  double half_width() const { return (hi - lo) / 2.0; }
  /// rate >= target - half_width().
  bool meets(double target) const { return rate >= target - half_width(); }
};

RateEstimate wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054);

/// Runs fn(0..n-1) on at most `jobs` threads. The first exception by index
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Root seed of trial i; pure function of (seed, i).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t i);
/// Data-generator seed for run `which` of a trial; independent of the tape.
std::uint64_t data_seed(std::uint64_t root_seed, std::uint64_t which);

// Outcome of one run as the pairing logic sees it.
struct RunOutcome {
  std::uint64_t root_seed = 0;
  bool ok = false;
  std::string key;    // canonical output key when ok
  std::string error;  // error kind when !ok
  std::string message;
};

struct PairedTrialResult {
  std::uint64_t root_seed = 0;
  bool agree = false;
  bool both_failed = false;  // same error kind in both runs
  RunOutcome first;
  RunOutcome second;
};

/// Throws Error(kConfiguration) when the two runs used different root seeds.
PairedTrialResult make_pair(RunOutcome first, RunOutcome second);

/// One run of the algorithm under test with shared tape `tape` and a sample
/// drawn with `data_seed`.
using PairedRun = std::function<RunOutcome(const RandomTape& tape, std::uint64_t data_seed)>;

struct ReplicabilityEstimate {
  RateEstimate rate;  // over pairs that did not both fail
  std::uint64_t pairs = 0;
  std::uint64_t both_failed = 0;
  std::vector<PairedTrialResult> results;  // by pair index
};

/// pairs >= 30. Pair i shares the tape RandomTape(trial_seed(seed, i)) and
/// draws two independent samples.
ReplicabilityEstimate estimate_replicability(const PairedRun& run, std::uint64_t pairs,
                                             std::uint64_t seed, unsigned jobs = 1);

struct ExpWeightAudit {
  bool passed = false;
  double value = 0.0;  // E_D[exp(M_{T+1})]
  double bound = 0.0;  // exp(2 T eps0)
};

/// Recomputes M_{T+1} from the report's votes and caps and checks
/// E_D[exp(M_{T+1})] <= exp(2 T eps0) (1 + 1e-9). Throws PreconditionUnmet
/// when some inner hypothesis has error above eps0 under D_{mu_t}.
ExpWeightAudit exp_weight_audit(const RunReport& report, const Problem& problem, double eps0);

struct DensityAudit {
  bool passed = true;
  std::uint64_t checked = 0;
  std::uint64_t excluded = 0;
  std::vector<std::string> violations;
};

/// rmetaboost: d(mu_t) >= eps/32 at every outer iteration up to and
/// including the first recorded threshold failure; later ones are excluded.
/// rboost_star: d(mu_{t+k}) >= d(mu_t)/2 for all k <= floor(1/gamma) over the
/// recorded densities and the final one.
DensityAudit density_audit(const RunReport& report);

/// 1/2 sum |p - q|. Throws DomainMismatch on different sizes.
double tv_distance(const FiniteDistribution& p, const FiniteDistribution& q);
FiniteDistribution empirical_distribution(const std::vector<std::uint64_t>& counts);

}  // namespace replboost
