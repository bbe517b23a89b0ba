#include "replboost/sampling.hpp"

#include <cmath>
#include <string>

#include "replboost/config.hpp"

namespace replboost {
namespace {

class Rejector {
 public:
  Rejector(PointFunction mu, const RandomTape& coins) : mu_(std::move(mu)), coins_(coins.stream()) {}

  PointId accept_next(Sample& input, RejectionStats& stats) {
    while (true) {
      if (input.remaining() == 0) {
        throw Error(ErrorKind::kSamplesExhausted,
                    "rejection sampler accepted " + std::to_string(stats.accepted) + " of " +
                        "the requested points after scanning " + std::to_string(stats.scanned));
      }
      const PointId x = input.next();
      ++stats.scanned;
      const double u = coins_.uniform();
      const double m = mu_(x);
      if (!(m >= 0.0 && m <= 1.0)) {
        throw Error(ErrorKind::kConfiguration, "reweighing measure must map into [0,1]");
      }
      if (u < m) {
        ++stats.accepted;
        return x;
      }
    }
  }

 private:
  PointFunction mu_;
  Rng coins_;
};

class RejectionStream final : public SampleStream {
 public:
  RejectionStream(Sample input, PointFunction mu, const RandomTape& coins,
                  std::shared_ptr<RejectionStats> stats)
      : input_(std::move(input)), rejector_(std::move(mu), coins), stats_(std::move(stats)) {
    if (!stats_) stats_ = std::make_shared<RejectionStats>();
  }

  PointId next() override { return rejector_.accept_next(input_, *stats_); }

 private:
  Sample input_;
  Rejector rejector_;
  std::shared_ptr<RejectionStats> stats_;
};

}  // namespace

std::uint64_t rejection_input_size(std::uint64_t m_target, double eps, double delta, double scale,
                                   double factor) {
  if (m_target < 1) throw Error(ErrorKind::kConfiguration, "m_target must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::kConfiguration, "eps must lie in (0,1]");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorKind::kConfiguration, "delta must lie in (0,1]");
  }
  detail::require_scale(scale);
  const double m =
      scale * factor * std::log(1.0 / delta) * static_cast<double>(m_target) / eps;
  return std::max(m_target, detail::ceil_count(m, "rejection input size"));
}

Sample rejection_sample(Sample& input, std::uint64_t m_target, const PointFunction& mu,
                        const RandomTape& coins, RejectionStats* stats) {
  RejectionStats local;
  RejectionStats& st = stats ? *stats : local;
  Rejector rejector(mu, coins);
  std::vector<PointId> out;
  out.reserve(static_cast<std::size_t>(m_target));
  while (out.size() < m_target) out.push_back(rejector.accept_next(input, st));
  return Sample::from_ids(std::move(out));
}

Sample rejection_stream(Sample input, std::uint64_t m_target, PointFunction mu,
                        const RandomTape& coins, std::shared_ptr<RejectionStats> stats) {
  return Sample::from_stream(
      std::make_shared<RejectionStream>(std::move(input), std::move(mu), coins, std::move(stats)),
      m_target);
}

}  // namespace replboost
