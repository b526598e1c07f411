#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "dbmd/rng.hpp"

using dbmd::CounterRng;

TEST_CASE("same key reproduces the same sequence") {
  CounterRng a(CounterRng::derive(7, 1));
  CounterRng b(CounterRng::derive(7, 1));
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams differ and do not interfere") {
  CounterRng a(CounterRng::derive(7, 1));
  CounterRng b(CounterRng::derive(7, 2));
  bool any_diff = false;
  for (int i = 0; i < 16; ++i) {
    if (a.next_u64() != b.next_u64()) any_diff = true;
  }
  CHECK(any_diff);

  // Draining one stream leaves another untouched.
  CounterRng c(CounterRng::derive(7, 3));
  CounterRng d(CounterRng::derive(7, 3));
  CounterRng noise(CounterRng::derive(7, 4));
  for (int i = 0; i < 1000; ++i) noise.next_u64();
  for (int i = 0; i < 16; ++i) CHECK(c.next_u64() == d.next_u64());
}

TEST_CASE("derive depends on every tag") {
  CHECK(CounterRng::derive(1, 2, 3) != CounterRng::derive(1, 3, 2));
  CHECK(CounterRng::derive(1) != CounterRng::derive(2));
  CHECK(CounterRng::derive(5, 0, 0, 1) != CounterRng::derive(5, 0, 1, 0));
}

TEST_CASE("open01 stays inside the open interval with the right mean") {
  CounterRng rng(CounterRng::derive(11));
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_open01();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("gaussian moments") {
  CounterRng rng(CounterRng::derive(13));
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.next_gaussian();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(sq / n - mean * mean == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma moments across shapes") {
  for (const double shape : {0.5, 1.0, 3.0, 10.0}) {
    CounterRng rng(CounterRng::derive(17, static_cast<std::uint64_t>(shape * 2)));
    double sum = 0.0;
    double sq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const double g = rng.next_gamma(shape);
      REQUIRE(g > 0.0);
      sum += g;
      sq += g * g;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.05));
    CHECK(var == doctest::Approx(shape).epsilon(0.1));
  }
}

TEST_CASE("gamma rejects non-positive shapes") {
  CounterRng rng(1);
  CHECK_THROWS_AS(rng.next_gamma(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.next_gamma(-1.0), std::invalid_argument);
}
