#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "replboost/config.hpp"
#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"
#include "replboost/rboost_star.hpp"
#include "replboost/report.hpp"
#include "replboost/sample.hpp"
#include "replboost/weak.hpp"

namespace replboost {

/// T = ceil(8 ln(2/eps)).
std::uint64_t compute_T(double eps);

// Capped misclassification counters of the meta booster, as a value.
//
// After t-1 rounds the state holds h_1..h_{t-1}, caps c_1..c_t and bits
// b_2..b_t, and describes
//   N_{s+1}(x) = M_s(x) + 1{h_s(x) != f(x)}
//   M_{s+1}(x) = min(N_{s+1}(x), c_{s+1}),  M_1 = 0
//   mu_t(x)    = exp(M_t(x) - c_t).
class MetaState {
 public:
  explicit MetaState(std::shared_ptr<const Problem> problem);

  std::uint64_t t() const { return votes_.size() + 1; }
  int cap() const { return caps_.back(); }
  const std::vector<int>& caps() const { return caps_; }
  const std::vector<int>& bits() const { return bits_; }
  const std::vector<MajorityVote>& votes() const { return votes_; }

  int M(PointId x) const;
  /// N_{t+1}(x) for a candidate h_t.
  int N_next(PointId x, const MajorityVote& h) const;
  double mu(PointId x) const { return std::exp(static_cast<double>(M(x) - cap())); }
  PointFunction mu_function() const;

  /// Folds h_t and b_{t+1} into a new state; *this is unchanged.
  MetaState step(const MajorityVote& h, int bit) const;

 private:
  int misses(std::size_t s, PointId x) const;

  std::shared_ptr<const Problem> problem_;
  std::vector<MajorityVote> votes_;
  std::vector<int> caps_{0};
  std::vector<int> bits_;
  // Lazy per-point caches: miss_[s][x] in {-1 unknown, 0, 1}; M over the
  // first m_upto_[x] rounds.
  mutable std::vector<std::vector<std::int8_t>> miss_;
  mutable std::vector<int> m_value_;
  mutable std::vector<std::uint32_t> m_upto_;
};

/// Counter update of one round (value semantics).
MetaState meta_step_counters(const MetaState& state, const MajorityVote& h, int b_next);

struct MetaPlan {
  std::uint64_t T = 0;
  BoostConfig inner;  // rBoost* at (rho/(6T), eps0)
  RBoostStarPlan inner_plan;
  Budget budget;
};

MetaPlan plan_rmetaboost(const BoostConfig& cfg, const WeakLearner& learner);

/// The meta booster. Per round t = 1..T: draw D_{mu_t} by rejection (sampled
/// mode), run rBoost* at (rho/(6T), 1/16) on it, then the threshold check at
/// eps/16 on phi(x) = 1{N_{t+1}(x) = c_t + 1} and the counter update.
/// In Mode::kExact the inner booster runs in exact mode on D_{mu_t}
/// itself; the outer threshold check always uses fresh samples.
/// Subroutine errors are rethrown with "(t, tag)" context.
RunReport rmetaboost(const Problem& problem, Sample& sample, const WeakLearner& learner,
                     const BoostConfig& cfg, const RandomTape& tape);

}  // namespace replboost
