#include "replboost/weak.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "replboost/config.hpp"

namespace replboost {

StumpGrid::StumpGrid(const Domain& domain, std::size_t resolution) : resolution_(resolution) {
  if (resolution == 0) throw Error(ErrorKind::kConfiguration, "grid resolution must be positive");
  hypotheses_.push_back(Hypothesis::constant(-1));
  hypotheses_.push_back(Hypothesis::constant(+1));
  for (std::size_t f = 0; f < domain.dimension(); ++f) {
    const auto [lo, hi] = domain.ranges()[f];
    std::vector<double> ts;
    ts.reserve(resolution);
    for (std::size_t k = 0; k < resolution; ++k) {
      ts.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution));
    }
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts) {
      hypotheses_.push_back(Hypothesis::stump(static_cast<std::uint32_t>(f), t, -1));
      hypotheses_.push_back(Hypothesis::stump(static_cast<std::uint32_t>(f), t, +1));
    }
    thresholds_.push_back(std::move(ts));
  }
}

StumpTable::StumpTable(const Problem& problem, const StumpGrid& grid)
    : count_(grid.size()), points_(problem.size()), hypotheses_(grid.hypotheses()) {
  miss_.resize(count_ * points_);
  for (std::size_t i = 0; i < count_; ++i) {
    const Hypothesis& h = grid.hypotheses()[i];
    for (PointId x = 0; x < points_; ++x) {
      miss_[i * points_ + x] = h.predict(*problem.domain, x) != problem.target(x) ? 1 : 0;
    }
  }
}

std::vector<double> StumpTable::errors(std::span<const double> weights, double total) const {
  std::vector<double> out(count_, 0.0);
  for (std::size_t i = 0; i < count_; ++i) {
    const std::uint8_t* row = miss_.data() + i * points_;
    double sum = 0.0;
    for (std::size_t x = 0; x < points_; ++x) {
      if (row[x]) sum += weights[x];
    }
    out[i] = sum / total;
  }
  return out;
}

LearnResult oracle_stump_learner(const FiniteDistribution& d_mu, const StumpTable& table,
                                 double gamma) {
  if (d_mu.size() != table.point_count()) {
    throw Error(ErrorKind::kDomainMismatch, "distribution does not match the stump table");
  }
  const auto errs = table.errors(d_mu.probs(), 1.0);
  std::size_t best = 0;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    if (errs[i] < errs[best]) best = i;
  }
  // Slack absorbs summation rounding when the best error sits exactly on 1/2 - gamma.
  if (errs[best] > 0.5 - gamma + 1e-12) {
    throw Error(ErrorKind::kNoWeakHypothesis,
                "best grid stump has error " + std::to_string(errs[best]) + " > 1/2 - gamma");
  }
  return {table.hypothesis(best), errs[best]};
}

std::uint64_t replicable_stump_sample_size(std::size_t grid_size, double gamma, double rho,
                                           double scale) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::kConfiguration, "rho must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw Error(ErrorKind::kConfiguration, "gamma must lie in (0,1/2)");
  }
  detail::require_scale(scale);
  const double w = gamma / 4.0;
  const double m = scale * std::log(static_cast<double>(grid_size) / rho) * 16.0 / (w * w);
  return std::max<std::uint64_t>(1, detail::ceil_count(m, "weak learner sample size"));
}

std::size_t select_rounded_argmin(std::span<const double> errors, double width, double offset) {
  std::size_t best = 0;
  double best_bucket = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double bucket = std::floor(errors[i] / width - offset);
    if (bucket < best_bucket) {
      best_bucket = bucket;
      best = i;
    }
  }
  return best;
}

LearnResult replicable_stump_learner(Sample& sample, double gamma, const StumpTable& table,
                                     const RandomTape& tape, std::uint64_t required) {
  const std::uint64_t m = sample.remaining();
  if (m == 0 || m < required) {
    throw Error(ErrorKind::kInsufficientSamples, "weak learner needs " + std::to_string(required) +
                                                     " samples, got " + std::to_string(m));
  }
  const auto counts = sample.histogram(table.point_count());
  if (counts.size() != table.point_count()) {
    throw Error(ErrorKind::kDomainMismatch, "sample contains ids outside the domain");
  }
  std::vector<double> weights(counts.begin(), counts.end());
  const auto errs = table.errors(weights, static_cast<double>(m));

  const double offset = tape.stream().uniform();
  const std::size_t best = select_rounded_argmin(errs, gamma / 4.0, offset);
  if (errs[best] > 0.5 - gamma / 2.0) {
    throw Error(ErrorKind::kNoWeakHypothesis, "selected stump has empirical error " +
                                                  std::to_string(errs[best]) +
                                                  " > 1/2 - gamma/2");
  }
  return {table.hypothesis(best), errs[best]};
}

OracleStumpLearner::OracleStumpLearner(std::shared_ptr<const StumpTable> table, double gamma)
    : table_(std::move(table)), gamma_(gamma) {}

LearnResult OracleStumpLearner::learn(const LearnInput& input) const {
  if (input.exact == nullptr) {
    throw Error(ErrorKind::kConfiguration, "oracle learner needs the exact reweighted distribution");
  }
  return oracle_stump_learner(*input.exact, *table_, gamma_);
}

ReplicableStumpLearner::ReplicableStumpLearner(std::shared_ptr<const StumpTable> table,
                                               double gamma, double scale, std::uint64_t cap)
    : table_(std::move(table)), gamma_(gamma), scale_(scale), cap_(cap) {}

std::uint64_t ReplicableStumpLearner::sample_complexity(double rho) const {
  return detail::apply_cap(
      replicable_stump_sample_size(table_->hypothesis_count(), gamma_, rho, scale_), cap_);
}

LearnResult ReplicableStumpLearner::learn(const LearnInput& input) const {
  if (input.sample == nullptr) {
    throw Error(ErrorKind::kConfiguration, "sample-based learner needs a sample");
  }
  return replicable_stump_learner(*input.sample, gamma_, *table_, input.tape,
                                  sample_complexity(input.rho));
}

}  // namespace replboost
