#include <cmath>

#include "doctest.h"
#include "replboost/core.hpp"
#include "replboost/report.hpp"

using namespace replboost;

namespace {

std::shared_ptr<const Domain> line(std::size_t n) {
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({static_cast<double>(i)});
  return std::make_shared<const Domain>(pts);
}

}  // namespace

TEST_CASE("predict_majority uses sign(0) = +1") {
  CHECK(predict_majority(std::vector<Label>{1, 1, -1}) == 1);
  CHECK(predict_majority(std::vector<Label>{1, -1}) == 1);
  CHECK(predict_majority(std::vector<Label>{}) == 1);
  CHECK(predict_majority(std::vector<Label>{-1, -1, 1}) == -1);

  const MajorityVote empty;
  const std::vector<double> x{0.3};
  CHECK(empty.predict(x) == 1);
  const MajorityVote tie({Hypothesis::constant(1), Hypothesis::constant(-1)});
  CHECK(tie.predict(x) == 1);
}

TEST_CASE("exact_error sums the disagreeing mass") {
  auto d = line(4);
  const TargetFunction f({1, 1, -1, -1});
  const Problem p(d, f, FiniteDistribution::uniform(4));
  const auto truth = [&](PointId x) { return f(x); };
  const auto inverted = [&](PointId x) { return -f(x); };
  const auto one_wrong = [&](PointId x) { return x == 2 ? 1 : f(x); };
  CHECK(exact_error(truth, p.dist, f) == 0.0);
  CHECK(exact_error(inverted, p.dist, f) == 1.0);
  CHECK(exact_error(one_wrong, p.dist, f) == doctest::Approx(0.25).epsilon(1e-15));

  // x > 1.5 -> -1 matches f exactly.
  CHECK(exact_error(Hypothesis::stump(0, 1.5, -1), p) == 0.0);
  CHECK(exact_error(Hypothesis::stump(0, 1.5, 1), p) == 1.0);
}

TEST_CASE("density and reweighting") {
  const FiniteDistribution d = FiniteDistribution::uniform(4);
  CHECK(density([](PointId) { return 1.0; }, d) == doctest::Approx(1.0));
  CHECK(density([](PointId) { return 0.0; }, d) == 0.0);
  CHECK(density([](PointId x) { return x < 2 ? 1.0 : 0.0; }, d) == doctest::Approx(0.5));

  const auto same = reweighted_distribution([](PointId) { return 1.0; }, d);
  const auto half = reweighted_distribution([](PointId) { return 0.5; }, d);
  for (PointId i = 0; i < 4; ++i) {
    CHECK(same(i) == doctest::Approx(0.25));
    CHECK(half(i) == doctest::Approx(0.25));
  }

  const FiniteDistribution ab = FiniteDistribution::uniform(2);
  const auto w = reweighted_distribution([](PointId x) { return x == 0 ? 1.0 : 0.5; }, ab);
  CHECK(w(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(w(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  try {
    reweighted_distribution([](PointId) { return 0.0; }, d);
    FAIL("expected ZeroDensity");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kZeroDensity);
  }
}

TEST_CASE("reweighting conserves probability and is smooth") {
  std::vector<double> weights;
  for (int i = 0; i < 97; ++i) weights.push_back(1.0 + (i * 37 % 11));
  const auto d = FiniteDistribution::from_weights(weights);
  for (int k = 1; k <= 20; ++k) {
    const PointFunction mu = [k](PointId x) {
      return std::fmod(0.013 * (x + 1) * k, 1.0) * 0.999 + 0.001;
    };
    const double dm = density(mu, d);
    const auto r = reweighted_distribution(mu, d);
    double sum = 0.0;
    for (double p : r.probs()) sum += p;
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    for (PointId x = 0; x < d.size(); ++x) {
      CHECK(r(x) / d(x) <= 1.0 / dm * (1 + 1e-12));
    }
  }
}

TEST_CASE("distributions validate their input") {
  CHECK_THROWS_AS(FiniteDistribution({0.5, 0.6}), Error);
  CHECK_THROWS_AS(FiniteDistribution({-0.1, 1.1}), Error);
  CHECK_NOTHROW(FiniteDistribution({0.5, 0.5}));
  CHECK_THROWS_AS(TargetFunction({1, 0}), Error);
  CHECK_THROWS_AS(Domain({{0.0}, {1.0, 2.0}}), Error);
  CHECK_THROWS_AS(Problem(line(3), TargetFunction({1, 1}), FiniteDistribution::uniform(3)), Error);
}

TEST_CASE("domain ranges default to the point extremes") {
  const Domain d({{0.0, 5.0}, {2.0, -1.0}});
  REQUIRE(d.ranges().size() == 2);
  CHECK(d.ranges()[0] == FeatureRange{0.0, 2.0});
  CHECK(d.ranges()[1] == FeatureRange{-1.0, 5.0});
}

TEST_CASE("hypothesis equality is canonical and survives serialization") {
  const std::vector<Hypothesis> hs{Hypothesis::constant(-1), Hypothesis::constant(1),
                                   Hypothesis::stump(0, 0.25, -1), Hypothesis::stump(0, 0.25, 1),
                                   Hypothesis::stump(1, 0.1, 1)};
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = 0; j < hs.size(); ++j) {
      CHECK((hs[i] == hs[j]) == (i == j));
      CHECK((hs[i] < hs[j]) == (i < j));
    }
    CHECK(hypothesis_from_json(to_json(hs[i])) == hs[i]);
  }
  const MajorityVote v(hs);
  const MajorityVote back = majority_vote_from_json(nlohmann::json::parse(to_json(v).dump()));
  CHECK(back == v);
  CHECK(canonical_key(back) == canonical_key(v));
  MajorityVote shorter(std::vector<Hypothesis>(hs.begin(), hs.end() - 1));
  CHECK_FALSE(shorter == v);
  CHECK(canonical_key(shorter) != canonical_key(v));
}

TEST_CASE("error annotation keeps the kind") {
  const Error e(ErrorKind::kSamplesExhausted, "ran out");
  const Error a = e.annotated("rMetaBoost (t=3, reject)");
  CHECK(a.kind() == ErrorKind::kSamplesExhausted);
  CHECK(std::string(a.what()) == "SamplesExhausted: rMetaBoost (t=3, reject): ran out");
}
