#include "replboost/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace replboost {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInsufficientSamples: return "InsufficientSamples";
    case ErrorKind::kSamplesExhausted: return "SamplesExhausted";
    case ErrorKind::kNoWeakHypothesis: return "NoWeakHypothesis";
    case ErrorKind::kIterationCapExceeded: return "IterationCapExceeded";
    case ErrorKind::kZeroDensity: return "ZeroDensity";
    case ErrorKind::kDomainMismatch: return "DomainMismatch";
    case ErrorKind::kPreconditionUnmet: return "PreconditionUnmet";
    case ErrorKind::kConfiguration: return "Configuration";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

Error Error::annotated(const std::string& context) const {
  std::string msg = what();
  // Strip our own kind prefix so it is not repeated.
  const auto prefix = std::string(to_string(kind_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
  return Error(kind_, context + ": " + msg);
}

Domain::Domain(std::vector<std::vector<double>> points, std::vector<FeatureRange> ranges)
    : size_(points.size()) {
  if (points.empty()) throw Error(ErrorKind::kConfiguration, "domain has no points");
  dim_ = points.front().size();
  if (dim_ == 0) throw Error(ErrorKind::kConfiguration, "domain points have no features");
  values_.reserve(size_ * dim_);
  for (const auto& p : points) {
    if (p.size() != dim_) throw Error(ErrorKind::kConfiguration, "inconsistent feature dimension");
    for (double v : p) {
      if (!std::isfinite(v)) throw Error(ErrorKind::kConfiguration, "non-finite feature value");
      values_.push_back(v);
    }
  }
  if (ranges.empty()) {
    ranges.resize(dim_, FeatureRange{std::numeric_limits<double>::infinity(),
                                     -std::numeric_limits<double>::infinity()});
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = 0; j < dim_; ++j) {
        ranges[j].lo = std::min(ranges[j].lo, values_[i * dim_ + j]);
        ranges[j].hi = std::max(ranges[j].hi, values_[i * dim_ + j]);
      }
    }
  } else if (ranges.size() != dim_) {
    throw Error(ErrorKind::kConfiguration, "range count does not match feature dimension");
  }
  for (const auto& r : ranges) {
    if (!(r.lo <= r.hi)) throw Error(ErrorKind::kConfiguration, "feature range with lo > hi");
  }
  ranges_ = std::move(ranges);
}

TargetFunction::TargetFunction(std::vector<Label> labels) : labels_(std::move(labels)) {
  for (Label y : labels_) {
    if (y != 1 && y != -1) throw Error(ErrorKind::kConfiguration, "labels must be -1 or +1");
  }
}

FiniteDistribution::FiniteDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error(ErrorKind::kConfiguration, "empty distribution");
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::kConfiguration, "probabilities must be finite and nonnegative");
    }
  }
  const double total = detail::compensated_sum(probs_);
  if (std::abs(total - 1.0) > kSumTolerance) {
    std::ostringstream os;
    os << "probabilities sum to " << total << ", not 1";
    throw Error(ErrorKind::kConfiguration, os.str());
  }
}

FiniteDistribution FiniteDistribution::uniform(std::size_t n) {
  return FiniteDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

FiniteDistribution FiniteDistribution::from_weights(std::span<const double> weights) {
  const double total = detail::compensated_sum(weights);
  if (!(total > 0.0)) throw Error(ErrorKind::kZeroDensity, "weights have zero total");
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& p : probs) p /= total;
  return FiniteDistribution(std::move(probs));
}

Problem::Problem(std::shared_ptr<const Domain> d, TargetFunction f, FiniteDistribution p)
    : domain(std::move(d)), target(std::move(f)), dist(std::move(p)) {
  if (!domain) throw Error(ErrorKind::kConfiguration, "null domain");
  if (target.size() != domain->size() || dist.size() != domain->size()) {
    throw Error(ErrorKind::kDomainMismatch, "labels/probabilities do not match the domain size");
  }
}

Hypothesis Hypothesis::constant(int polarity) {
  Hypothesis h;
  h.kind = Kind::kConstant;
  h.polarity = polarity >= 0 ? 1 : -1;
  return h;
}

Hypothesis Hypothesis::stump(std::uint32_t feature, double threshold, int polarity) {
  Hypothesis h;
  h.kind = Kind::kStump;
  h.feature = feature;
  h.threshold = threshold;
  h.polarity = polarity >= 0 ? 1 : -1;
  return h;
}

std::string Hypothesis::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == Kind::kConstant) {
    os << "const(" << polarity << ")";
  } else {
    os << "stump(f" << feature << ">" << threshold << "," << polarity << ")";
  }
  return os.str();
}

long MajorityVote::vote(std::span<const double> x) const {
  long sum = 0;
  for (const auto& h : hypotheses_) sum += h.predict(x);
  return sum;
}

Label predict_majority(std::span<const Label> votes) {
  long sum = 0;
  for (Label v : votes) sum += v;
  return sum >= 0 ? 1 : -1;
}

double exact_error(const std::function<Label(PointId)>& predictor, const FiniteDistribution& dist,
                   const TargetFunction& target) {
  if (dist.size() != target.size()) throw Error(ErrorKind::kDomainMismatch, "exact_error");
  std::vector<double> mass;
  for (PointId id = 0; id < dist.size(); ++id) {
    if (predictor(id) != target(id)) mass.push_back(dist(id));
  }
  return detail::compensated_sum(mass);
}

double exact_error(const Hypothesis& h, const Problem& problem) {
  return exact_error(h, problem, problem.dist);
}

double exact_error(const MajorityVote& h, const Problem& problem) {
  return exact_error(h, problem, problem.dist);
}

double exact_error(const Hypothesis& h, const Problem& problem, const FiniteDistribution& dist) {
  return exact_error([&](PointId id) { return h.predict(*problem.domain, id); }, dist,
                     problem.target);
}

double exact_error(const MajorityVote& h, const Problem& problem, const FiniteDistribution& dist) {
  return exact_error([&](PointId id) { return h.predict(*problem.domain, id); }, dist,
                     problem.target);
}

double density(const PointFunction& mu, const FiniteDistribution& dist) {
  std::vector<double> terms(dist.size());
  for (PointId id = 0; id < dist.size(); ++id) terms[id] = mu(id) * dist(id);
  return detail::compensated_sum(terms);
}

FiniteDistribution reweighted_distribution(const PointFunction& mu, const FiniteDistribution& dist) {
  std::vector<double> weights(dist.size());
  for (PointId id = 0; id < dist.size(); ++id) weights[id] = mu(id) * dist(id);
  const double d = detail::compensated_sum(weights);
  if (!(d > 0.0)) throw Error(ErrorKind::kZeroDensity, "reweighing measure has zero density");
  return FiniteDistribution::from_weights(weights);
}

namespace detail {

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace detail
}  // namespace replboost
