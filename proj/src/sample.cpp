#include "replboost/sample.hpp"

#include <algorithm>
#include <string>

namespace replboost {

IidStream::IidStream(const FiniteDistribution& dist, std::uint64_t data_seed)
    : rng_(RandomTape(data_seed).derive("data", 0).key()) {
  cdf_.reserve(dist.size());
  double acc = 0.0;
  for (double p : dist.probs()) {
    acc += p;
    cdf_.push_back(acc);
  }
  // Pin everything from the last nonzero bucket on to 1 so every u in [0,1)
  // lands on a point with positive mass.
  std::size_t last = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (dist.probs()[i] > 0.0) last = i;
  }
  for (std::size_t i = last; i < cdf_.size(); ++i) cdf_[i] = 1.0;
}

PointId IidStream::next() {
  const double u = rng_.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<PointId>(it - cdf_.begin());
}

Sample Sample::iid(const FiniteDistribution& dist, std::uint64_t data_seed, std::uint64_t length) {
  return from_stream(std::make_shared<IidStream>(dist, data_seed), length);
}

Sample Sample::from_ids(std::vector<PointId> ids) {
  const auto n = static_cast<std::uint64_t>(ids.size());
  return from_stream(std::make_shared<VectorStream>(std::move(ids)), n);
}

Sample Sample::from_stream(std::shared_ptr<SampleStream> stream, std::uint64_t length) {
  auto node = std::make_shared<Node>();
  node->source = stream.get();
  node->stream = std::move(stream);
  node->limit = length;
  return Sample(std::move(node));
}

PointId Sample::next() {
  for (const Node* n = node_.get(); n != nullptr; n = n->parent.get()) {
    if (n->consumed >= n->limit) {
      throw Error(ErrorKind::kSamplesExhausted,
                  "sample of length " + std::to_string(n->limit) + " is used up");
    }
  }
  const PointId id = node_->source->next();
  for (Node* n = node_.get(); n != nullptr; n = n->parent.get()) ++n->consumed;
  return id;
}

Sample Sample::take(std::uint64_t n) {
  if (n > remaining()) {
    throw Error(ErrorKind::kInsufficientSamples, "requested " + std::to_string(n) +
                                                     " fresh samples, " +
                                                     std::to_string(remaining()) + " remain");
  }
  auto child = std::make_shared<Node>();
  child->parent = node_;
  child->source = node_->source;
  child->limit = n;
  return Sample(std::move(child));
}

std::vector<PointId> Sample::drain() {
  std::vector<PointId> out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(remaining(), 1u << 24)));
  while (remaining() > 0) out.push_back(next());
  return out;
}

std::vector<std::uint64_t> Sample::histogram(std::size_t domain_size) {
  std::vector<std::uint64_t> counts(domain_size, 0);
  while (remaining() > 0) {
    const PointId id = next();
    if (id >= counts.size()) counts.resize(id + 1, 0);
    ++counts[id];
  }
  return counts;
}

}  // namespace replboost
