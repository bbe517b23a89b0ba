#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "replboost/config.hpp"
#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"
#include "replboost/report.hpp"
#include "replboost/sample.hpp"
#include "replboost/weak.hpp"

namespace replboost {

/// 1 if g <= 0, else (1 - gamma)^(g/2).
double mu_star(double g, double gamma);

// Description of g_t and mu_{t+1}: the hypotheses so far plus the margin
// deduction theta = gamma / (2 + gamma). Values are computed per point on
// demand and memoized per point.
class BoostState {
 public:
  BoostState(std::shared_ptr<const Domain> domain, const TargetFunction& target, double gamma);

  std::size_t t() const { return hypotheses_.size(); }
  double theta() const { return theta_; }
  double gamma() const { return gamma_; }
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }

  void push(const Hypothesis& h) { hypotheses_.push_back(h); }

  /// g_t(x) = sum_{s<=t} (h_s(x) f(x) - theta) over the pushed hypotheses.
  double g(PointId x) const;
  /// mu_{t+1}(x) = mu_star(g_t(x), gamma).
  double mu(PointId x) const { return mu_star(g(x), gamma_); }
  PointFunction mu_function() const;

 private:
  std::shared_ptr<const Domain> domain_;
  std::vector<Label> labels_;
  double gamma_;
  double theta_;
  std::vector<Hypothesis> hypotheses_;
  // Per point: integer sum of h_s(x) f(x) over the first upto_[x] hypotheses.
  mutable std::vector<long> agree_;
  mutable std::vector<std::uint32_t> upto_;
};

struct RBoostStarPlan {
  std::uint64_t t0_max = 0;
  std::uint64_t period = 0;  // floor(1/gamma)
  Budget budget;
};

/// Derived round cap, replicability split and per-line budgets.
RBoostStarPlan plan_rboost_star(const BoostConfig& cfg, const WeakLearner& learner);

/// The modified smooth booster. Each round: rejection-sample from mu_t (when
/// the learner needs samples), call the weak learner, update g; every
/// floor(1/gamma) rounds run the threshold check on mu_t at eps/2 and stop
/// on 0. In Mode::kExact the check is the exact test d(mu_t) < eps/2 and
/// `sample` may be null when the learner is an oracle.
///
/// `problem.dist` is the distribution the run learns against; it is used for
/// exact densities and errors recorded in the report. Throws
/// IterationCapExceeded if no check fires within T0_max rounds.
RunReport rboost_star(const Problem& problem, Sample* sample, const WeakLearner& learner,
                      const BoostConfig& cfg, const RandomTape& tape);

}  // namespace replboost
