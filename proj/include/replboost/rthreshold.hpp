#pragma once

#include <cstdint>

#include "replboost/core.hpp"
#include "replboost/random_tape.hpp"
#include "replboost/sample.hpp"

namespace replboost {

struct ThresholdParams {
  double z = 0.1;
  double rho = 0.5;
  double delta = 0.05;  // must lie in (0, rho/8]

  void validate() const;
};

/// m = ceil(scale * c * ln(1/delta) / (z rho^2)), c = 700 by default.
std::uint64_t threshold_sample_size(const ThresholdParams& p, double scale, double constant = 700.0);

struct ThresholdOutcome {
  int bit = 0;
  double phi_bar = 0.0;
  double cutoff = 0.0;  // z0
  std::uint64_t m = 0;
};

/// Cutoff z0 uniform on [3z/4, 3z/2], one 53-bit draw from the tape's stream.
double draw_cutoff(double z, const RandomTape& tape);

/// Replicable threshold check: consumes all of S, returns 1{mean phi > z0}.
/// Throws InsufficientSamples when |S| < required.
ThresholdOutcome rthreshold(Sample& sample, double z, const PointFunction& phi,
                            const RandomTape& tape, std::uint64_t required = 1);

}  // namespace replboost
