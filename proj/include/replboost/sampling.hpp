#pragma once

#include <cstdint>
#include <memory>

#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"
#include "replboost/sample.hpp"

namespace replboost {

/// m = max(m_target, ceil(scale * factor * ln(1/delta) * m_target / eps)).
/// The clamp covers delta = 1, where the bound is 0 but fewer inputs than
/// targets can never succeed.
std::uint64_t rejection_input_size(std::uint64_t m_target, double eps, double delta, double scale,
                                   double factor = 8.0);

struct RejectionStats {
  std::uint64_t scanned = 0;
  std::uint64_t accepted = 0;
};

/// Scans `input` in order, drawing one coin u ~ U[0,1) per candidate from
/// `coins` and accepting x iff u < mu(x); returns the first m_target
/// accepted points. Throws SamplesExhausted when `input` runs out first.
Sample rejection_sample(Sample& input, std::uint64_t m_target, const PointFunction& mu,
                        const RandomTape& coins, RejectionStats* stats = nullptr);

/// Lazy form of rejection_sample: a Sample of length m_target whose items
/// are accepted on demand. Exhaustion of `input` surfaces as
/// SamplesExhausted on the read that needed the missing item.
Sample rejection_stream(Sample input, std::uint64_t m_target, PointFunction mu,
                        const RandomTape& coins, std::shared_ptr<RejectionStats> stats = nullptr);

}  // namespace replboost
