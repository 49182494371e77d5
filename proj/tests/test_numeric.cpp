#include <doctest.h>

#include <cmath>
#include <vector>

#include "coordhr/numeric.hpp"

using namespace coordhr;

TEST_CASE("normal cdf against tabulated values") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(normal_cdf(0.5) == doctest::Approx(0.6914624612740131).epsilon(1e-13));
  CHECK(normal_cdf(-1.96) == doctest::Approx(0.024997895148220435).epsilon(1e-12));
  CHECK(normal_cdf(-9.5) == doctest::Approx(1.0494515075362604e-21).epsilon(1e-10));
}

TEST_CASE("normal cdf matches Simpson quadrature of the density") {
  // Oracle: composite Simpson rule on [-12, x].
  for (double x : {-3.0, -1.2, 0.3, 0.9, 2.5}) {
    const int m = 20000;
    const double a = -12.0, h = (x - a) / m;
    double s = normal_pdf(a) + normal_pdf(x);
    for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * normal_pdf(a + i * h);
    CHECK(std::abs(normal_cdf(x) - s * h / 3.0) < 1e-12);
  }
}

TEST_CASE("log_sum_exp is stable") {
  const std::vector<double> v = {1000.0, 1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(1000.0 + std::log(2.0)));
  const std::vector<double> w = {-1e4, std::log(3.0)};
  CHECK(log_sum_exp(w) == doctest::Approx(std::log(3.0)));
}

TEST_CASE("binomials") {
  CHECK(binomial(10, 3) == doctest::Approx(120.0));
  CHECK(binomial(29, 1) == doctest::Approx(29.0));
  CHECK(std::exp(log_binomial(50, 25)) == doctest::Approx(126410606437752.0).epsilon(1e-12));
  CHECK(log_factorial(0) == 0.0);
  CHECK(std::exp(log_factorial(10)) == doctest::Approx(3628800.0).epsilon(1e-13));
}

TEST_CASE("compensated sum keeps small terms") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == doctest::Approx(1000.0));
}
