#include <atomic>
#include <cmath>

#include "doctest.h"
#include "replboost/domain_io.hpp"
#include "replboost/harness.hpp"

using namespace replboost;

namespace {

// Independent Wilson score interval.
std::pair<double, double> wilson_oracle(double k, double n) {
  const double z = 1.959963984540054;
  const double p = k / n;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  return {centre - half, centre + half};
}

RunOutcome ok(std::uint64_t seed, std::string key) { return {seed, true, std::move(key), "", ""}; }
RunOutcome failed(std::uint64_t seed, std::string kind) { return {seed, false, "", std::move(kind), "x"}; }

}  // namespace

TEST_CASE("wilson interval") {
  const RateEstimate r = wilson_interval(50, 100);
  CHECK(r.rate == 0.5);
  CHECK(r.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(r.hi == doctest::Approx(0.5962).epsilon(1e-3));
  for (auto [k, n] : {std::pair{0, 10}, {10, 10}, {97, 100}, {3, 500}}) {
    const auto e = wilson_interval(k, n);
    const auto [lo, hi] = wilson_oracle(k, n);
    CHECK(e.lo == doctest::Approx(lo).epsilon(1e-12));
    CHECK(e.hi == doctest::Approx(hi).epsilon(1e-12));
    CHECK(e.lo >= 0.0);
    CHECK(e.hi <= 1.0);
  }
  CHECK(wilson_interval(95, 100).meets(0.95));
  CHECK(!wilson_interval(80, 100).meets(0.95));
}

TEST_CASE("tv distance") {
  const FiniteDistribution a({0.5, 0.5});
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(FiniteDistribution({1.0, 0.0}), FiniteDistribution({0.0, 1.0})) == 1.0);
  CHECK(tv_distance(a, FiniteDistribution({0.6, 0.4})) == doctest::Approx(0.1));
  CHECK_THROWS_AS(tv_distance(a, FiniteDistribution({1.0})), Error);
  const FiniteDistribution e = empirical_distribution({1, 3, 0});
  CHECK(e(1) == 0.75);
  CHECK(e(2) == 0.0);
}

TEST_CASE("pairing rules") {
  CHECK_THROWS_AS(make_pair(ok(1, "a"), ok(2, "a")), Error);
  CHECK(make_pair(ok(1, "a"), ok(1, "a")).agree);
  CHECK(!make_pair(ok(1, "a"), ok(1, "b")).agree);
  const auto both = make_pair(failed(1, "NoWeakHypothesis"), failed(1, "NoWeakHypothesis"));
  CHECK(both.both_failed);
  CHECK(!make_pair(failed(1, "NoWeakHypothesis"), failed(1, "SamplesExhausted")).both_failed);
  CHECK(!make_pair(failed(1, "NoWeakHypothesis"), ok(1, "a")).agree);
}

TEST_CASE("replicability estimate") {
  const PairedRun deterministic = [](const RandomTape& tape, std::uint64_t) {
    return ok(tape.root_seed(), std::to_string(tape.root_seed() % 7));
  };
  const auto est = estimate_replicability(deterministic, 40, 3, 4);
  CHECK(est.pairs == 40);
  CHECK(est.rate.rate == 1.0);
  CHECK(est.results.size() == 40);

  // Output depends only on the data: pairs disagree unless the data seeds collide.
  const PairedRun data_only = [](const RandomTape& tape, std::uint64_t data) {
    return ok(tape.root_seed(), std::to_string(data));
  };
  CHECK(estimate_replicability(data_only, 30, 3).rate.rate == 0.0);

  // Both-failed pairs leave the denominator.
  const PairedRun half_fail = [](const RandomTape& tape, std::uint64_t) {
    return tape.root_seed() % 2 ? failed(tape.root_seed(), "NoWeakHypothesis")
                                : ok(tape.root_seed(), "k");
  };
  const auto hf = estimate_replicability(half_fail, 60, 5, 2);
  CHECK(hf.both_failed + hf.rate.trials == 60);
  CHECK(hf.both_failed > 0);
  CHECK(hf.rate.rate == 1.0);

  CHECK_THROWS_AS(estimate_replicability(deterministic, 29, 3), Error);
  // Job count does not change the result.
  const auto one = estimate_replicability(half_fail, 40, 9, 1);
  const auto many = estimate_replicability(half_fail, 40, 9, 8);
  CHECK(one.both_failed == many.both_failed);
}

TEST_CASE("seed derivation") {
  CHECK(trial_seed(1, 0) != trial_seed(1, 1));
  CHECK(trial_seed(1, 0) != trial_seed(2, 0));
  CHECK(trial_seed(5, 3) == trial_seed(5, 3));
  CHECK(data_seed(7, 0) != data_seed(7, 1));
  CHECK(data_seed(7, 0) != 7);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(100, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw Error(ErrorKind::kConfiguration, std::to_string(i));
    });
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find('7') != std::string::npos);
  }
  parallel_for(0, 4, [](std::size_t) { FAIL("no calls expected"); });
}

TEST_CASE("exp-weight audit") {
  const Problem p = generate_margin_domain({});
  RunReport r;
  r.algorithm = "rmetaboost";
  const auto empty = exp_weight_audit(r, p, 1.0 / 16.0);
  CHECK(empty.value == doctest::Approx(1.0));
  CHECK(empty.passed);

  // Constant +1 votes on Bernoulli problems: all mass on one label.
  const MajorityVote right({Hypothesis::constant(1)});
  const Problem b = bernoulli_problem(1.0);  // all mass on the +1 point
  r.votes = {right, right, right};
  r.caps = {0, 1, 2, 3};
  r.iterations.resize(3);
  for (auto& rec : r.iterations) rec.exact_error = 0.0;
  const auto perfect = exp_weight_audit(r, b, 1.0 / 16.0);
  CHECK(perfect.value == doctest::Approx(1.0));
  CHECK(perfect.bound == doctest::Approx(std::exp(6.0 / 16.0)));

  // Mass on the -1 point: every round misses, M climbs with the cap.
  const Problem miss = bernoulli_problem(0.0);
  r.iterations[1].exact_error = 0.5;
  CHECK_THROWS_AS(exp_weight_audit(r, miss, 1.0 / 16.0), Error);
  for (auto& rec : r.iterations) rec.exact_error = 0.0;
  const auto bad = exp_weight_audit(r, miss, 1.0 / 16.0);
  CHECK(bad.value == doctest::Approx(std::exp(3.0)));
  CHECK(!bad.passed);
}

TEST_CASE("density audit") {
  RunReport meta;
  meta.algorithm = "rmetaboost";
  meta.config.eps = 0.1;
  meta.iterations.resize(3);
  meta.iterations[0].density = 1.0;
  meta.iterations[1].density = 0.5;
  meta.iterations[2].density = 0.001;
  CHECK(!density_audit(meta).passed);
  meta.iterations[1].threshold_failed = true;
  const auto excluded = density_audit(meta);
  CHECK(excluded.passed);
  CHECK(excluded.checked == 2);
  CHECK(excluded.excluded == 1);

  RunReport star;
  star.algorithm = "rboost_star";
  star.config.gamma = 0.25;
  star.iterations.resize(3);
  star.iterations[0].density = 1.0;
  star.iterations[1].density = 0.8;
  star.iterations[2].density = 0.6;
  star.final_density = 0.55;
  CHECK(density_audit(star).passed);
  star.final_density = 0.45;
  CHECK(!density_audit(star).passed);
}
