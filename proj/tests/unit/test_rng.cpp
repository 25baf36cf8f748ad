#include "doctest.h"
#include "driftgate/rng.hpp"

#include <cmath>
#include <cstdint>
#include <map>

using namespace driftgate;

TEST_CASE("splitmix64 is deterministic and seed-sensitive") {
  SplitMix64 a(42), b(42), c(43);
  for (int i = 0; i < 16; ++i) CHECK(a.next() == b.next());
  bool differs = false;
  SplitMix64 a2(42);
  for (int i = 0; i < 16; ++i) differs |= a2.next() != c.next();
  CHECK(differs);
}

TEST_CASE("next_u01 stays in [0,1) with sane mean") {
  SplitMix64 rng(7);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_u01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("next_below is bounded and roughly uniform") {
  SplitMix64 rng(11);
  std::map<std::uint32_t, int> counts;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const std::uint32_t v = rng.next_below(10);
    REQUIRE(v < 10u);
    ++counts[v];
  }
  for (const auto& [value, count] : counts)
    CHECK(std::abs(count / static_cast<double>(n) - 0.1) < 0.01);
}

TEST_CASE("poisson(1) zero-draw frequency matches e^-1") {
  SplitMix64 rng(5);
  int zeros = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (rng.poisson(1.0) == 0) ++zeros;
  CHECK(std::abs(zeros / static_cast<double>(n) - std::exp(-1.0)) < 0.005);
}

TEST_CASE("poisson mean tracks lambda, including the chunked regime") {
  SplitMix64 rng(6);
  for (double lambda : {0.5, 6.0, 40.0}) {
    double sum = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) sum += rng.poisson(lambda);
    CHECK(std::abs(sum / n - lambda) < 0.05 * lambda + 0.02);
  }
}

TEST_CASE("normal moments") {
  SplitMix64 rng(8);
  double sum = 0.0, sq = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(2.0, 3.0);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::abs(mean - 2.0) < 0.05);
  CHECK(std::abs(var - 9.0) < 0.3);
}

TEST_CASE("exponential mean") {
  SplitMix64 rng(9);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.exponential(3.5);
  CHECK(std::abs(sum / n - 3.5) < 0.06);
}

TEST_CASE("log_normal hits the requested arithmetic mean") {
  SplitMix64 rng(10);
  double sum = 0.0;
  int above_half = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = rng.log_normal(30.0, 1.0);
    sum += x;
    if (x > 15.0) ++above_half;
  }
  CHECK(std::abs(sum / n - 30.0) < 0.6);
  // P(X > 15) for mean 30, sigma_log 1: Phi(sigma/2 - ln(2)/sigma) = 0.5766
  CHECK(std::abs(above_half / static_cast<double>(n) - 0.5766) < 0.01);
}

TEST_CASE("counter draws depend only on the counters") {
  const double forward = counter_u01(3, 1, 2);
  // interleave unrelated draws; pure functions are unaffected by call order
  counter_u01(99, 5, 6);
  CHECK(counter_u01(3, 1, 2) == forward);
  CHECK(counter_u01(3, 1, 2) != counter_u01(3, 2, 1));
  CHECK(counter_u64(1, 2, 3, 4) == counter_u64(1, 2, 3, 4));
  CHECK(counter_u64(1, 2, 3, 4) != counter_u64(2, 2, 3, 4));
}

TEST_CASE("counter_below and counter_poisson distributions") {
  std::map<std::uint32_t, int> counts;
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[counter_below(21, 0, i, 4)];
  for (const auto& [value, count] : counts) {
    REQUIRE(value < 4u);
    CHECK(std::abs(count / static_cast<double>(n) - 0.25) < 0.01);
  }
  int zeros = 0;
  for (int i = 0; i < n; ++i)
    if (counter_poisson(22, 3, i, 1.0) == 0) ++zeros;
  CHECK(std::abs(zeros / static_cast<double>(n) - std::exp(-1.0)) < 0.008);
}

TEST_CASE("hash_combine separates nearby keys") {
  CHECK(hash_combine(1, 2) != hash_combine(2, 1));
  CHECK(hash_combine(0, 0) != hash_combine(0, 1));
  CHECK(hash_combine(0, 0) != hash_combine(1, 0));
}
