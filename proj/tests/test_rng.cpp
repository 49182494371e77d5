#include <doctest.h>

#include <cmath>
#include <set>

#include "coordhr/rng.hpp"

using coordhr::Rng;

TEST_CASE("same seed gives the same stream") {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("substreams are reproducible and distinct") {
  const Rng root(9);
  Rng s1 = root.substream(1), s1b = root.substream(1), s2 = root.substream(2);
  CHECK(s1.seed() == s1b.seed());
  CHECK(s1.seed() != s2.seed());
  CHECK(s1.next_u64() == s1b.next_u64());
}

TEST_CASE("derive_seed depends on every path element") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(coordhr::derive_seed(5, {a, b}));
  }
  CHECK(seen.size() == 400);
  CHECK(coordhr::derive_seed(5, {1, 2}) != coordhr::derive_seed(5, {2, 1}));
  CHECK(coordhr::hash_label("uniformity") != coordhr::hash_label("pinsker"));
}

TEST_CASE("uniform and normal moments") {
  Rng rng(1);
  const int N = 200000;
  double su = 0, su2 = 0, sn = 0, sn2 = 0, se = 0;
  for (int i = 0; i < N; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential();
  }
  CHECK(su / N == doctest::Approx(0.5).epsilon(0.01));
  CHECK(su2 / N == doctest::Approx(1.0 / 3.0).epsilon(0.01));
  CHECK(std::abs(sn / N) < 5.0 / std::sqrt(N));
  CHECK(sn2 / N == doctest::Approx(1.0).epsilon(0.02));
  CHECK(se / N == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("index is unbiased over a small range") {
  Rng rng(2);
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 30000; ++i) ++counts[rng.index(3)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 400);
}
