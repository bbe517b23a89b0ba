#include <cmath>

#include "doctest.h"
#include "replboost/domain_io.hpp"
#include "replboost/harness.hpp"
#include "replboost/rthreshold.hpp"

using namespace replboost;

namespace {

// Independent evaluation of ceil(scale * c ln(1/delta) / (z rho^2)).
std::uint64_t oracle_size(long double z, long double rho, long double delta, long double scale) {
  return static_cast<std::uint64_t>(std::ceil(scale * 700.0L * std::log(1.0L / delta) / (z * rho * rho)));
}

const PointFunction kOne = [](PointId x) { return x == 1 ? 1.0 : 0.0; };

}  // namespace

TEST_CASE("threshold sample size") {
  CHECK(oracle_size(0.1L, 0.5L, 0.05L, 1.0L) == 83881);
  CHECK(threshold_sample_size({0.1, 0.5, 0.05}, 1.0) == 83881);
  // z = rho = 1 is outside (0,1); use the formula at the boundary directly.
  CHECK(oracle_size(1.0L, 1.0L, std::exp(-1.0L), 1.0L) == 700);
  CHECK(threshold_sample_size({0.5, 0.5, 0.05}, 0.5) == oracle_size(0.5L, 0.5L, 0.05L, 0.5L));
  CHECK_THROWS_AS(threshold_sample_size({0.1, 0.5, 0.05}, 0.0), Error);
  CHECK_THROWS_AS(threshold_sample_size({0.1, 0.5, 0.07}, 1.0), Error);  // delta > rho/8
  CHECK(threshold_sample_size({0.1, 0.5, 0.0625}, 1e-9) == 1);
}

TEST_CASE("constant functions give forced bits") {
  const Problem p = bernoulli_problem(0.5);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Sample s = Sample::iid(p.dist, seed, 100);
    CHECK(rthreshold(s, 0.3, [](PointId) { return 0.0; }, RandomTape(seed)).bit == 0);
    Sample t = Sample::iid(p.dist, seed, 100);
    CHECK(rthreshold(t, 0.25, [](PointId) { return 1.0; }, RandomTape(seed)).bit == 1);
  }
}

TEST_CASE("cutoff lies in [3z/4, 3z/2] and is a pure function of the tape") {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const double z0 = draw_cutoff(0.2, RandomTape(seed).derive("thresh", 0));
    CHECK(z0 >= 0.15);
    CHECK(z0 <= 0.3);
    CHECK(z0 == draw_cutoff(0.2, RandomTape(seed).derive("thresh", 0)));
  }
  // The draw is u * 3z/4 + 3z/4 with u the first 53-bit uniform of the stream.
  const RandomTape tape(11);
  const double u = tape.stream().uniform();
  CHECK(draw_cutoff(0.4, tape) == 0.75 * 0.4 + u * (1.5 * 0.4 - 0.75 * 0.4));
}

TEST_CASE("rthreshold is deterministic given sample and tape") {
  const Problem p = bernoulli_problem(0.1);
  Sample a = Sample::iid(p.dist, 3, 5000);
  Sample b = Sample::iid(p.dist, 3, 5000);
  const auto oa = rthreshold(a, 0.1, kOne, RandomTape(8));
  const auto ob = rthreshold(b, 0.1, kOne, RandomTape(8));
  CHECK(oa.bit == ob.bit);
  CHECK(oa.phi_bar == ob.phi_bar);
  CHECK(oa.cutoff == ob.cutoff);
  CHECK(oa.m == 5000);
}

TEST_CASE("raising phi never flips the bit from 1 to 0") {
  const FiniteDistribution d = FiniteDistribution::uniform(6);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const PointFunction low = [](PointId x) { return 0.02 * x; };
    const PointFunction high = [](PointId x) { return std::min(1.0, 0.02 * x + 0.01 * (x % 2)); };
    Sample a = Sample::iid(d, seed, 300);
    Sample b = Sample::iid(d, seed, 300);
    const int lo_bit = rthreshold(a, 0.07, low, RandomTape(seed)).bit;
    const int hi_bit = rthreshold(b, 0.07, high, RandomTape(seed)).bit;
    CHECK(hi_bit >= lo_bit);
  }
}

TEST_CASE("rthreshold rejects short samples and bad phi") {
  const Problem p = bernoulli_problem(0.1);
  Sample s = Sample::iid(p.dist, 1, 10);
  try {
    rthreshold(s, 0.1, kOne, RandomTape(1), 11);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInsufficientSamples);
  }
  Sample t = Sample::iid(p.dist, 1, 10);
  CHECK_THROWS_AS(rthreshold(t, 0.1, [](PointId) { return 1.5; }, RandomTape(1)), Error);
}

TEST_CASE("correctness bullets at reduced scale") {
  // Correctness check at scale 1/10 so the test stays fast; the acceptance
  // suite repeats it at full size.
  const ThresholdParams params{0.1, 0.5, 0.05};
  const std::uint64_t m = threshold_sample_size(params, 0.1);
  for (const auto& [mean, want] : {std::pair{0.05, 0}, std::pair{0.2, 1}}) {
    const Problem p = bernoulli_problem(mean);
    int hits = 0;
    for (std::uint64_t i = 0; i < 100; ++i) {
      Sample s = Sample::iid(p.dist, data_seed(i, 0), m);
      hits += rthreshold(s, params.z, kOne, RandomTape(i), m).bit == want;
    }
    CHECK(wilson_interval(hits, 100).meets(0.95));
  }
}
