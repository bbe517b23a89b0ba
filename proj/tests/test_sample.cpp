#include <numeric>

#include "doctest.h"
#include "replboost/sample.hpp"

using namespace replboost;

namespace {

std::vector<PointId> iota_ids(PointId n) {
  std::vector<PointId> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("fresh requests return disjoint consecutive ranges") {
  Sample s = Sample::from_ids(iota_ids(20));
  Sample a = s.take(5);
  const auto ra = a.drain();
  Sample b = s.take(5);
  const auto rb = b.drain();
  CHECK(ra == std::vector<PointId>{0, 1, 2, 3, 4});
  CHECK(rb == std::vector<PointId>{5, 6, 7, 8, 9});
  CHECK(s.consumed() == 10);
  CHECK(s.remaining() == 10);
}

TEST_CASE("a reservation costs only what is read") {
  Sample s = Sample::from_ids(iota_ids(20));
  {
    Sample a = s.take(15);
    CHECK(a.next() == 0);
    CHECK(a.next() == 1);
  }
  CHECK(s.consumed() == 2);
  Sample b = s.take(3);
  CHECK(b.drain() == std::vector<PointId>{2, 3, 4});
}

TEST_CASE("nested views advance every ancestor") {
  Sample s = Sample::from_ids(iota_ids(10));
  Sample a = s.take(8);
  Sample b = a.take(4);
  b.next();
  b.next();
  CHECK(b.consumed() == 2);
  CHECK(a.consumed() == 2);
  CHECK(s.consumed() == 2);
}

TEST_CASE("limits raise the documented errors") {
  Sample s = Sample::from_ids(iota_ids(4));
  try {
    s.take(5);
    FAIL("expected InsufficientSamples");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kInsufficientSamples);
  }
  Sample a = s.take(2);
  a.next();
  a.next();
  try {
    a.next();
    FAIL("expected SamplesExhausted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSamplesExhausted);
  }
  // A view cannot read past its parent's limit either.
  Sample b = s.take(2);
  Sample c = s.take(2);
  c.next();
  c.next();
  CHECK_THROWS_AS(b.next(), Error);
}

TEST_CASE("i.i.d. draws follow the distribution and skip zero-mass points") {
  const FiniteDistribution d({0.1, 0.0, 0.6, 0.3, 0.0});
  Sample s = Sample::iid(d, 17, 200000);
  const auto h = s.histogram(5);
  CHECK(h[1] == 0);
  CHECK(h[4] == 0);
  CHECK(static_cast<double>(h[0]) / 200000 == doctest::Approx(0.1).epsilon(0.03));
  CHECK(static_cast<double>(h[2]) / 200000 == doctest::Approx(0.6).epsilon(0.01));
  CHECK(static_cast<double>(h[3]) / 200000 == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("i.i.d. samples are reproducible from the data seed") {
  const FiniteDistribution d = FiniteDistribution::uniform(10);
  Sample a = Sample::iid(d, 5, 1000);
  Sample b = Sample::iid(d, 5, 1000);
  Sample c = Sample::iid(d, 6, 1000);
  const auto ra = a.drain();
  CHECK(ra == b.drain());
  CHECK(ra != c.drain());
}
