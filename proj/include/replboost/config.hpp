#pragma once

#include <cstdint>
#include <string>

namespace replboost {

enum class Mode { kExact, kSampled };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct BoostConfig {
  double rho = 0.5;
  double eps = 0.1;
  double gamma = 0.1;
  double eps0 = 1.0 / 16.0;       // inner error used by the meta booster
  double c_threshold = 700.0;     // constant in the threshold sample bound
  double rejection_factor = 8.0;  // constant in the rejection input bound
  double c0 = 16.0;               // rBoost* round cap T0_max = ceil(c0 / (eps gamma^2))
  double budget_scale = 1.0;      // multiplies every sample-size formula
  // Upper bound on the samples a single threshold check or weak-learner call
  // consumes (0 = none). Rejection inputs are never capped.
  std::uint64_t sample_cap = 0;
  Mode mode = Mode::kSampled;

  /// Throws Error(kConfiguration) when a parameter leaves its range.
  void validate() const;
};

namespace detail {
/// ceil(x) as a sample count; rejects non-finite or > 2^62 budgets.
std::uint64_t ceil_count(double x, const char* what);
std::uint64_t apply_cap(std::uint64_t m, std::uint64_t cap);
void require_scale(double scale);
}  // namespace detail

}  // namespace replboost
