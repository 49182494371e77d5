#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <sstream>

#include "coordhr/mixture.hpp"
#include "coordhr/numeric.hpp"

using namespace coordhr;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Simpson quadrature of |phi(x) - phi(x - d)| / 2 on [-12, 12 + d].
double tv_quadrature(double d) {
  const int m = 40000;
  const double a = -12.0, b = 12.0 + d, h = (b - a) / m;
  auto f = [&](double x) { return 0.5 * std::abs(normal_pdf(x) - normal_pdf(x - d)); };
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("lambda weights") {
  CHECK(lambda_weight(MultiIndex({2, 0}), 2) == doctest::Approx(0.25));
  CHECK(lambda_weight(MultiIndex({1, 1}), 2) == doctest::Approx(0.5));
  CHECK(lambda_weight(MultiIndex({0, 2}), 2) == doctest::Approx(0.25));
  CHECK(lambda_weight(MultiIndex({7}), 1) == doctest::Approx(1.0));
  CHECK_THROWS(MultiIndex({1, 2}, 4));
  // Large tau stays finite in log space.
  const double lw = log_lambda_weight(MultiIndex({5000, 5000}), 2);
  CHECK(std::isfinite(lw));
  CHECK(lw < 0.0);
}

TEST_CASE("weights sum to one") {
  for (int n = 1; n <= 4; ++n) {
    for (int tau = 0; tau <= 12; ++tau) {
      CompensatedSum s;
      for_each_multi_index(n, tau, false, [&](const MultiIndex& I) { s.add(lambda_weight(I, n)); });
      CHECK(std::abs(s.value() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("enumeration") {
  const auto all = enumerate_multi_indices(2, 2, false);
  REQUIRE(all.size() == 3);
  CHECK(all[0] == MultiIndex({2, 0}));
  CHECK(all[1] == MultiIndex({1, 1}));
  CHECK(all[2] == MultiIndex({0, 2}));
  const auto full = enumerate_multi_indices(2, 2, true);
  REQUIRE(full.size() == 1);
  CHECK(full[0] == MultiIndex({1, 1}));
  CHECK(enumerate_multi_indices(3, 4, true).size() == 3);
  for (int n = 1; n <= 4; ++n) {
    for (int tau = 0; tau <= 9; ++tau) {
      CHECK(enumerate_multi_indices(n, tau, false).size() ==
            static_cast<std::size_t>(std::llround(multi_index_count(n, tau, false))));
      CHECK(enumerate_multi_indices(n, tau, true).size() ==
            static_cast<std::size_t>(std::llround(multi_index_count(n, tau, true))));
    }
  }
  CHECK_THROWS_AS(enumerate_multi_indices(10, 60, false), std::length_error);
}

TEST_CASE("sampled multi-indices follow the weights") {
  Rng rng(1);
  const int N = 100000;
  int ones = 0;
  for (int i = 0; i < N; ++i) {
    const MultiIndex I = sample_multi_index(2, 2, rng);
    REQUIRE(I[0] + I[1] == 2);
    if (I[0] == 1) ++ones;
  }
  CHECK(std::abs(ones / double(N) - 0.5) <= 3 * 0.0016);

  // Chi-square goodness of fit, n = 2, tau = 4, 1e6 draws.
  std::map<std::vector<int>, double> freq;
  const int D = 1000000;
  for (int i = 0; i < D; ++i) freq[sample_multi_index(2, 4, rng).counts()] += 1.0;
  double chi2 = 0.0;
  const auto all = enumerate_multi_indices(2, 4, false);
  for (const auto& I : all) {
    const double e = D * lambda_weight(I, 2);
    chi2 += (freq[I.counts()] - e) * (freq[I.counts()] - e) / e;
  }
  const boost::math::chi_squared dist(static_cast<double>(all.size() - 1));
  CHECK(chi2 < boost::math::quantile(dist, 1.0 - 1e-3));

  int not_full = 0;
  for (int i = 0; i < 1000000; ++i) {
    if (!sample_multi_index(2, 28, rng).full_rank()) ++not_full;
  }
  CHECK(not_full == 0);
}

TEST_CASE("mixture density") {
  const double sigma = 0.3;
  const Vec one = Vec::Constant(1, 0.2);
  const Vec x1 = Vec::Constant(1, 0.5);
  CHECK(std::exp(mixture_log_density(one, sigma, 3, x1).log_density) ==
        doctest::Approx(normal_pdf(0.5, 0.2, 3 * sigma * sigma)));

  const Vec v = v2(0.1, -0.1);
  CHECK(std::exp(mixture_log_density(v, sigma, 2, v).log_density) ==
        doctest::Approx(0.5 / (2 * kPi * sigma * sigma)));

  const Vec x = v2(0.4, 0.2);
  const double exact = std::exp(mixture_log_density(v, sigma, 4, x).log_density);
  const DensityEstimate mc = mixture_log_density(v, sigma, 4, x, McEstimate{1000000, 7});
  CHECK(std::abs(std::exp(mc.log_density) - exact) <= 3 * mc.std_error);
  CHECK(mc.std_error > 0.0);
}

TEST_CASE("equal-covariance TV") {
  const MultiIndex I({1, 1});
  CHECK(gaussian_tv_equal_cov(v2(0, 0), v2(0, 0), I, 0.1) == 0.0);
  CHECK(gaussian_tv_equal_cov(v2(0, 0), v2(0.1, 0), I, 0.1) ==
        doctest::Approx(0.382925).epsilon(1e-6));
  CHECK(std::abs(tv_quadrature(1.0) - (2 * normal_cdf(0.5) - 1)) < 1e-8);
  CHECK(gaussian_tv_equal_cov(v2(0, 0), v2(0, 0.1), MultiIndex({2, 0}), 0.1) == 1.0);

  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const MultiIndex J = sample_full_rank_multi_index(2, 10, rng);
    const double sigma = rng.uniform(0.01, 0.2);
    const Vec v = v2(rng.normal(), rng.normal()) * sigma;
    const Vec u = v2(rng.normal(), rng.normal()) * sigma;
    const double d2 = std::pow(v(0) - u(0), 2) / (J[0] * sigma * sigma) +
                      std::pow(v(1) - u(1), 2) / (J[1] * sigma * sigma);
    CHECK(std::abs(gaussian_tv_equal_cov(v, u, J, sigma) - tv_quadrature(std::sqrt(d2))) < 1e-8);
  }
}

TEST_CASE("Pinsker domination on random instances") {
  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng.index(4));
    const MultiIndex I = sample_full_rank_multi_index(n, n + static_cast<int>(rng.index(30)), rng);
    const double sigma = std::pow(10.0, rng.uniform(-3, 0));
    Vec v(n), u(n);
    for (int j = 0; j < n; ++j) {
      v(j) = rng.normal();
      u(j) = v(j) + sigma * rng.normal();
    }
    REQUIRE(gaussian_tv_equal_cov(v, u, I, sigma) <= std::min(1.0, pinsker_bound(v, u, sigma)));
  }
}

TEST_CASE("pinsker bound examples") {
  CHECK(pinsker_bound(v2(0, 0), v2(0.6, 0.8), 1.0) == doctest::Approx(0.5));
  CHECK(pinsker_bound(v2(1, 1), v2(1, 1), 0.1) == 0.0);
  CHECK(pinsker_bound(v2(0, 0), v2(0, 0.2), 0.1) == doctest::Approx(1.0));
}

TEST_CASE("non-full-rank mass") {
  const NonFullRankMass m = non_full_rank_mass(2, 28);
  CHECK(m.union_bound == doctest::Approx(7.450580596923828e-09).epsilon(1e-12));
  CHECK(m.exact == doctest::Approx(m.union_bound).epsilon(1e-12));
  CHECK(m.union_bound <= std::pow(2.0, -19));
  const NonFullRankMass z = non_full_rank_mass(3, 0);
  CHECK(z.union_bound == doctest::Approx(3.0));
  CHECK(z.exact == doctest::Approx(1.0));
  // Exact value against direct enumeration.
  for (int n = 2; n <= 4; ++n) {
    for (int tau = 0; tau <= 10; ++tau) {
      double direct = 0.0;
      for_each_multi_index(n, tau, false, [&](const MultiIndex& I) {
        if (!I.full_rank()) direct += lambda_weight(I, n);
      });
      CHECK(non_full_rank_mass(n, tau).exact == doctest::Approx(direct).epsilon(1e-12));
      CHECK(non_full_rank_mass(n, tau).exact <= non_full_rank_mass(n, tau).union_bound + 1e-15);
    }
  }
}

TEST_CASE("aggregated component TV stays below one half for close starts") {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const double sigma = rng.uniform(1e-3, 0.1);
    const double angle = rng.uniform(0, 2 * kPi);
    const Vec v = v2(rng.normal(), rng.normal());
    const Vec u = v + sigma * rng.uniform() * v2(std::cos(angle), std::sin(angle));
    for (int tau = 2; tau <= 8; ++tau) CHECK(aggregated_component_tv(v, u, sigma, tau) <= 0.5);
  }
}

TEST_CASE("full-rank mixture sampler matches the mixture") {
  Rng rng(5);
  const Vec v = v2(0, 0);
  const double sigma = 0.1;
  const int N = 200000;
  double var0 = 0.0;
  for (int i = 0; i < N; ++i) var0 += std::pow(sample_full_rank_mixture(v, sigma, 4, rng)(0), 2);
  // E[i_1 | full rank] for n=2, tau=4: (1*4 + 2*6 + 3*4) / 14 = 2.
  CHECK(var0 / N == doctest::Approx(2.0 * sigma * sigma).epsilon(0.02));
}

TEST_CASE("weights csv") {
  std::ostringstream os;
  write_weights_csv(os, 2, 2, false);
  CHECK(os.str() == "i_1,i_2,lambda\n2,0,0.25\n1,1,0.5\n0,2,0.25\n");
}
