#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace replboost {

using PointId = std::uint32_t;
using Label = int;  // always -1 or +1

/// Evaluable description of a function on the domain, e.g. a reweighing
/// measure mu: X -> [0,1] or a threshold indicator phi: X -> [0,1].
using PointFunction = std::function<double(PointId)>;

enum class ErrorKind {
  kInsufficientSamples,
  kSamplesExhausted,
  kNoWeakHypothesis,
  kIterationCapExceeded,
  kZeroDensity,
  kDomainMismatch,
  kPreconditionUnmet,
  kConfiguration,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

  /// Same kind, message prefixed with where the error surfaced.
  Error annotated(const std::string& context) const;

 private:
  ErrorKind kind_;
};

struct FeatureRange {
  double lo = 0.0;
  double hi = 1.0;
  bool operator==(const FeatureRange&) const = default;
};

// Finite input domain with dense ids 0..n-1 and a fixed feature dimension.
class Domain {
 public:
  Domain(std::vector<std::vector<double>> points, std::vector<FeatureRange> ranges = {});

  std::size_t size() const { return size_; }
  std::size_t dimension() const { return dim_; }
  std::span<const double> features(PointId id) const {
    return {values_.data() + static_cast<std::size_t>(id) * dim_, dim_};
  }
  /// Declared per-feature ranges; defaults to the min/max over the points.
  const std::vector<FeatureRange>& ranges() const { return ranges_; }

 private:
  std::size_t size_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
  std::vector<FeatureRange> ranges_;
};

class TargetFunction {
 public:
  explicit TargetFunction(std::vector<Label> labels);

  Label operator()(PointId id) const { return labels_[id]; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<Label>& labels() const { return labels_; }

 private:
  std::vector<Label> labels_;
};

class FiniteDistribution {
 public:
  static constexpr double kSumTolerance = 1e-12;

  /// Validates nonnegativity and unit sum (within kSumTolerance).
  explicit FiniteDistribution(std::vector<double> probs);

  static FiniteDistribution uniform(std::size_t n);
  /// Normalizes nonnegative weights with positive total.
  static FiniteDistribution from_weights(std::span<const double> weights);

  double operator()(PointId id) const { return probs_[id]; }
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

// A labeled finite learning problem: domain, target f and data distribution D.
struct Problem {
  std::shared_ptr<const Domain> domain;
  TargetFunction target;
  FiniteDistribution dist;

  Problem(std::shared_ptr<const Domain> d, TargetFunction f, FiniteDistribution p);
  std::size_t size() const { return domain->size(); }
};

struct Hypothesis {
  enum class Kind : std::uint8_t { kConstant = 0, kStump = 1 };

  // Field order defines the canonical (lexicographic) order.
  Kind kind = Kind::kConstant;
  std::uint32_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;

  static Hypothesis constant(int polarity);
  static Hypothesis stump(std::uint32_t feature, double threshold, int polarity);

  /// Stump: polarity if x[feature] > threshold, else -polarity.
  Label predict(std::span<const double> x) const {
    if (kind == Kind::kConstant) return polarity;
    return x[feature] > threshold ? polarity : -polarity;
  }
  Label predict(const Domain& domain, PointId id) const { return predict(domain.features(id)); }

  std::string to_string() const;

  auto operator<=>(const Hypothesis&) const = default;
  bool operator==(const Hypothesis&) const = default;
};

class MajorityVote {
 public:
  MajorityVote() = default;
  explicit MajorityVote(std::vector<Hypothesis> hypotheses) : hypotheses_(std::move(hypotheses)) {}

  void push_back(const Hypothesis& h) { hypotheses_.push_back(h); }
  const std::vector<Hypothesis>& hypotheses() const { return hypotheses_; }
  std::size_t size() const { return hypotheses_.size(); }
  bool empty() const { return hypotheses_.empty(); }

  /// Sum of votes at x.
  long vote(std::span<const double> x) const;
  /// sign(sum of votes) with sign(0) = +1.
  Label predict(std::span<const double> x) const { return vote(x) >= 0 ? 1 : -1; }
  Label predict(const Domain& domain, PointId id) const { return predict(domain.features(id)); }

  bool operator==(const MajorityVote&) const = default;

 private:
  std::vector<Hypothesis> hypotheses_;
};

/// sign(sum_t votes[t]) with the tie convention sign(0) = +1.
Label predict_majority(std::span<const Label> votes);

/// Sum of D(x) over the points where the predictor disagrees with f.
double exact_error(const std::function<Label(PointId)>& predictor, const FiniteDistribution& dist,
                   const TargetFunction& target);
double exact_error(const Hypothesis& h, const Problem& problem);
double exact_error(const MajorityVote& h, const Problem& problem);
double exact_error(const Hypothesis& h, const Problem& problem, const FiniteDistribution& dist);
double exact_error(const MajorityVote& h, const Problem& problem, const FiniteDistribution& dist);

/// d(mu) = E_{x~D}[mu(x)].
double density(const PointFunction& mu, const FiniteDistribution& dist);

/// D_mu(x) = mu(x) D(x) / d(mu); throws ZeroDensity when d(mu) = 0.
FiniteDistribution reweighted_distribution(const PointFunction& mu, const FiniteDistribution& dist);

namespace detail {
/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);
}  // namespace detail

}  // namespace replboost
