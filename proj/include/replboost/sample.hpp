#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"

namespace replboost {

// Producer behind a Sample. Each call yields the next unseen item; an item
// is never produced twice.
class SampleStream {
 public:
  virtual ~SampleStream() = default;
  virtual PointId next() = 0;
};

// I.i.d. draws from a finite distribution by inverse CDF on a dedicated
// data generator. The data generator is not part of any algorithm's tape.
class IidStream final : public SampleStream {
 public:
  IidStream(const FiniteDistribution& dist, std::uint64_t data_seed);
  PointId next() override;

 private:
  std::vector<double> cdf_;
  Rng rng_;
};

class VectorStream final : public SampleStream {
 public:
  explicit VectorStream(std::vector<PointId> ids) : ids_(std::move(ids)) {}
  PointId next() override { return ids_.at(pos_++); }

 private:
  std::vector<PointId> ids_;
  std::size_t pos_ = 0;
};

// Ordered sequence of domain ids with a consumed-prefix cursor.
//
// take(n) hands out a view over the next (at most) n unseen items; reads
// through the view advance the cursor of every ancestor. A view only pulls
// items when read, so a reservation of n fresh samples costs only what the
// consumer actually inspects, and the unread tail is never reused.
class Sample {
 public:
  static Sample iid(const FiniteDistribution& dist, std::uint64_t data_seed, std::uint64_t length);
  static Sample from_ids(std::vector<PointId> ids);
  static Sample from_stream(std::shared_ptr<SampleStream> stream, std::uint64_t length);

  std::uint64_t size() const { return node_->limit; }
  std::uint64_t consumed() const { return node_->consumed; }
  std::uint64_t remaining() const { return node_->limit - node_->consumed; }

  /// Consumes one item. Throws SamplesExhausted past the end.
  PointId next();

  /// Fresh view of n items. Throws InsufficientSamples if n > remaining().
  Sample take(std::uint64_t n);

  /// Consumes everything remaining.
  std::vector<PointId> drain();
  /// Consumes everything remaining into per-id counts (size >= domain_size).
  std::vector<std::uint64_t> histogram(std::size_t domain_size);

 private:
  struct Node {
    std::shared_ptr<Node> parent;
    std::shared_ptr<SampleStream> stream;  // owned by the root
    SampleStream* source = nullptr;
    std::uint64_t limit = 0;
    std::uint64_t consumed = 0;
  };

  explicit Sample(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

}  // namespace replboost
