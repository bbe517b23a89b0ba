#include "replboost/rthreshold.hpp"

#include <cmath>
#include <string>

#include "replboost/config.hpp"

namespace replboost {

void ThresholdParams::validate() const {
  if (!(z > 0.0 && z < 1.0)) throw Error(ErrorKind::kConfiguration, "threshold z must lie in (0,1)");
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::kConfiguration, "rho must lie in (0,1)");
  if (!(delta > 0.0 && delta <= rho / 8.0)) {
    throw Error(ErrorKind::kConfiguration, "delta must lie in (0, rho/8]");
  }
}

std::uint64_t threshold_sample_size(const ThresholdParams& p, double scale, double constant) {
  p.validate();
  detail::require_scale(scale);
  const double m = scale * constant * std::log(1.0 / p.delta) / (p.z * p.rho * p.rho);
  return std::max<std::uint64_t>(1, detail::ceil_count(m, "threshold sample size"));
}

double draw_cutoff(double z, const RandomTape& tape) {
  const double u = tape.stream().uniform();
  return 0.75 * z + u * (1.5 * z - 0.75 * z);
}

ThresholdOutcome rthreshold(Sample& sample, double z, const PointFunction& phi,
                            const RandomTape& tape, std::uint64_t required) {
  if (!(z > 0.0 && z < 1.0)) throw Error(ErrorKind::kConfiguration, "threshold z must lie in (0,1)");
  const std::uint64_t m = sample.remaining();
  if (m == 0 || m < required) {
    throw Error(ErrorKind::kInsufficientSamples, "threshold check needs " +
                                                     std::to_string(required) + " samples, got " +
                                                     std::to_string(m));
  }
  ThresholdOutcome out;
  out.m = m;
  out.cutoff = draw_cutoff(z, tape);

  // Sum by id: phi is evaluated once per distinct point.
  const auto counts = sample.histogram(0);
  double sum = 0.0;
  for (PointId id = 0; id < counts.size(); ++id) {
    if (counts[id] == 0) continue;
    const double v = phi(id);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kConfiguration, "threshold function must map into [0,1]");
    }
    sum += static_cast<double>(counts[id]) * v;
  }
  out.phi_bar = sum / static_cast<double>(m);
  out.bit = out.phi_bar > out.cutoff ? 1 : 0;
  return out;
}

}  // namespace replboost
