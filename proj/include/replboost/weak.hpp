#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"
#include "replboost/sample.hpp"

namespace replboost {

// Per-feature threshold lists derived from the declared feature ranges
// only, never from samples, so hypothesis identity is replicable.
class StumpGrid {
 public:
  static constexpr std::size_t kDefaultResolution = 32;

  /// thresholds_f = { lo + (hi - lo) k / resolution : k = 0..resolution-1 }.
  StumpGrid(const Domain& domain, std::size_t resolution = kDefaultResolution);

  std::size_t resolution() const { return resolution_; }
  const std::vector<std::vector<double>>& thresholds() const { return thresholds_; }

  /// Candidate hypotheses in canonical order: the two constants, then
  /// stumps by (feature, threshold, polarity).
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  std::size_t size() const { return hypotheses_.size(); }

 private:
  std::size_t resolution_;
  std::vector<std::vector<double>> thresholds_;
  std::vector<Hypothesis> hypotheses_;
};

// Which domain points each grid hypothesis misclassifies.
class StumpTable {
 public:
  StumpTable(const Problem& problem, const StumpGrid& grid);

  std::size_t hypothesis_count() const { return count_; }
  std::size_t point_count() const { return points_; }
  const Hypothesis& hypothesis(std::size_t i) const { return hypotheses_[i]; }
  std::span<const std::uint8_t> misses(std::size_t i) const {
    return {miss_.data() + i * points_, points_};
  }

  /// Weighted error of every hypothesis: sum_x miss[h][x] * weight[x] / total.
  std::vector<double> errors(std::span<const double> weights, double total) const;

 private:
  std::size_t count_;
  std::size_t points_;
  std::vector<Hypothesis> hypotheses_;
  std::vector<std::uint8_t> miss_;
};

struct LearnResult {
  Hypothesis hypothesis;
  double training_error = 0.0;  // exact under D_mu, or empirical
};

/// Lexicographically-first stump minimizing exact error under D_mu.
/// Throws NoWeakHypothesis if that error exceeds 1/2 - gamma.
LearnResult oracle_stump_learner(const FiniteDistribution& d_mu, const StumpTable& table, double gamma);

/// m_W(rho) = ceil(scale * ln(|grid| / rho) * 16 / w^2), w = gamma / 4.
std::uint64_t replicable_stump_sample_size(std::size_t grid_size, double gamma, double rho,
                                           double scale);

/// Rounded-error argmin: bucket(e) = floor(e / width - offset); the first
/// index attaining the smallest bucket wins.
std::size_t select_rounded_argmin(std::span<const double> errors, double width, double offset);

/// Empirical errors of every grid stump on S (all of S is consumed), one
/// shared random offset from the tape, argmin of the rounded errors.
/// Throws InsufficientSamples if |S| < required, NoWeakHypothesis if the
/// selected stump's empirical error exceeds 1/2 - gamma/2.
LearnResult replicable_stump_learner(Sample& sample, double gamma, const StumpTable& table,
                                     const RandomTape& tape, std::uint64_t required);

// Weak-learner contract as the boosters see it.
struct LearnInput {
  const FiniteDistribution* exact = nullptr;  // D_mu (oracle learners)
  Sample* sample = nullptr;                   // draws from D_mu (sample-based learners)
  double rho = 0.0;
  RandomTape tape{0};
};

class WeakLearner {
 public:
  virtual ~WeakLearner() = default;
  virtual double advantage() const = 0;
  virtual bool needs_samples() const = 0;
  /// Samples one call consumes at replicability rho; 0 for oracle learners.
  virtual std::uint64_t sample_complexity(double rho) const = 0;
  virtual LearnResult learn(const LearnInput& input) const = 0;
};

class OracleStumpLearner final : public WeakLearner {
 public:
  OracleStumpLearner(std::shared_ptr<const StumpTable> table, double gamma);
  double advantage() const override { return gamma_; }
  bool needs_samples() const override { return false; }
  std::uint64_t sample_complexity(double) const override { return 0; }
  LearnResult learn(const LearnInput& input) const override;

 private:
  std::shared_ptr<const StumpTable> table_;
  double gamma_;
};

class ReplicableStumpLearner final : public WeakLearner {
 public:
  ReplicableStumpLearner(std::shared_ptr<const StumpTable> table, double gamma, double scale,
                         std::uint64_t cap = 0);
  double advantage() const override { return gamma_; }
  bool needs_samples() const override { return true; }
  std::uint64_t sample_complexity(double rho) const override;
  LearnResult learn(const LearnInput& input) const override;

 private:
  std::shared_ptr<const StumpTable> table_;
  double gamma_;
  double scale_;
  std::uint64_t cap_;
};

}  // namespace replboost
