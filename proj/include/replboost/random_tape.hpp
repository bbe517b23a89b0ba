#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace replboost {

/// SplitMix64 finalizer. Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Maps 64 random bits to [0,1) using the top 53 bits.
constexpr double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// xoshiro256** (Blackman & Vigna). 256-bit state, output is a fixed
// function of the state on every platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::array<std::uint64_t, 2> key);
  /// Raw generator state, as in the reference implementation.
  static Rng from_state(std::array<std::uint64_t, 4> state);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next(); }
  std::uint64_t next();
  /// Uniform double in [0,1), 53-bit mantissa construction.
  double uniform() { return to_unit_interval(next()); }
  /// Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  Rng() = default;
  std::array<std::uint64_t, 4> s_{};
};

// Hierarchical shared-randomness tape. The stream of a tape is a pure
// function of (root_seed, path); deriving a child never touches the parent
// or any sibling, so data-dependent consumption in one subroutine cannot
// shift the randomness seen by another.
class RandomTape {
 public:
  struct Frame {
    std::string tag;
    std::uint64_t counter = 0;
    bool operator==(const Frame&) const = default;
  };

  explicit RandomTape(std::uint64_t root_seed);

  RandomTape derive(std::string_view tag, std::uint64_t counter) const;
  /// Fresh generator positioned at the start of this tape's stream.
  Rng stream() const { return Rng(key_); }

  std::uint64_t root_seed() const { return root_seed_; }
  const std::vector<Frame>& path() const { return path_; }
  const std::array<std::uint64_t, 2>& key() const { return key_; }
  /// "root/tag:counter/..." for diagnostics.
  std::string describe() const;

  bool operator==(const RandomTape& other) const {
    return root_seed_ == other.root_seed_ && path_ == other.path_;
  }

 private:
  std::uint64_t root_seed_;
  std::vector<Frame> path_;
  std::array<std::uint64_t, 2> key_;
};

}  // namespace replboost
