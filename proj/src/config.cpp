#include "replboost/config.hpp"

#include <algorithm>
#include <cmath>

#include "replboost/core.hpp"

namespace replboost {

std::string to_string(Mode mode) { return mode == Mode::kExact ? "exact" : "sampled"; }

Mode parse_mode(const std::string& text) {
  if (text == "exact") return Mode::kExact;
  if (text == "sampled") return Mode::kSampled;
  throw Error(ErrorKind::kConfiguration, "unknown mode '" + text + "' (expected exact|sampled)");
}

void BoostConfig::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(rho)) throw Error(ErrorKind::kConfiguration, "rho must lie in (0,1)");
  if (!open_unit(eps)) throw Error(ErrorKind::kConfiguration, "eps must lie in (0,1)");
  if (!(gamma > 0.0 && gamma < 0.5)) {
    throw Error(ErrorKind::kConfiguration, "gamma must lie in (0,1/2)");
  }
  if (!open_unit(eps0)) throw Error(ErrorKind::kConfiguration, "eps0 must lie in (0,1)");
  if (!(c_threshold > 0.0) || !(rejection_factor > 0.0) || !(c0 > 0.0)) {
    throw Error(ErrorKind::kConfiguration, "constants must be positive");
  }
  detail::require_scale(budget_scale);
}

namespace detail {

std::uint64_t ceil_count(double x, const char* what) {
  constexpr double kMax = 4611686018427387904.0;  // 2^62
  if (!std::isfinite(x) || x > kMax) {
    throw Error(ErrorKind::kConfiguration, std::string(what) + " exceeds 2^62 samples");
  }
  if (x <= 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(x));
}

std::uint64_t apply_cap(std::uint64_t m, std::uint64_t cap) {
  return cap == 0 ? m : std::min(m, cap);
}

void require_scale(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::kConfiguration, "budget scale must be positive");
  }
}

}  // namespace detail
}  // namespace replboost
