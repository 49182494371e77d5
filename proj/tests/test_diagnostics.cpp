#include <doctest.h>

#include <cmath>
#include <sstream>

#include "coordhr/diagnostics.hpp"
#include "coordhr/numeric.hpp"
#include "support.hpp"

using namespace coordhr;

TEST_CASE("tail bounds") {
  CHECK(chernoff_bound(10.0, 1.0) == doctest::Approx(std::exp(-10 * (2 * std::log(2.0) - 1))));
  CHECK(chernoff_bound(0.0, 0.5) == 1.0);
  CHECK_THROWS(chernoff_bound(1.0, 0.0));
  CHECK(gaussian_tail_bound(2.0, 1.0) == doctest::Approx(std::exp(-2.0)));
  CHECK_THROWS(gaussian_tail_bound(0.5, 1.0));
  CHECK(pinsker_tv_bound(0.5) == doctest::Approx(0.5));
  CHECK_THROWS(pinsker_tv_bound(-1e-3));

  CHECK(probability_bound(ChernoffQuery{10.0, 1.0}) == chernoff_bound(10.0, 1.0));
  CHECK(probability_bound(GaussianTailQuery{3.0, 1.0}) == gaussian_tail_bound(3.0, 1.0));
  CHECK(probability_bound(PinskerQuery{0.02}) == doctest::Approx(0.1));
}

TEST_CASE("tail bounds dominate the true tails") {
  // Poisson upper tail by direct summation.
  for (double mu : {1.0, 5.0, 20.0}) {
    for (double delta : {0.5, 1.0, 2.0}) {
      const double cut = (1 + delta) * mu;
      double term = std::exp(-mu), cdf = 0.0;
      for (int k = 0; k <= static_cast<int>(std::floor(cut)); ++k) {
        cdf += term;
        term *= mu / (k + 1);
      }
      CHECK(1.0 - cdf <= chernoff_bound(mu, delta) + 1e-15);
    }
  }
  for (double t : {1.0, 1.5, 3.0, 6.0}) {
    CHECK(2.0 * (1.0 - normal_cdf(t)) <= gaussian_tail_bound(t, 1.0));
  }
}

TEST_CASE("uniform samples are close to uniform") {
  Rng rng(1);
  const ConvexBody box = ConvexBody::cube(2);
  std::vector<Vec> s;
  for (int i = 0; i < 20000; ++i) s.push_back(exact_uniform_sample(box, rng));
  const TvEstimate binned = tv_to_uniform(s, box, 8);
  CHECK(binned.value <= binned.noise_floor() + binned.ci_halfwidth);
  const TvEstimate g = gauge_tv_to_uniform(s, box, 32);
  CHECK(g.value <= g.noise_floor() + g.ci_halfwidth);
  CHECK(g.method == TvMethod::gauge);

  // A polytope uses a Monte Carlo reference.
  Rng prng(2);
  const ConvexBody poly = testing::sandwiched_polytope(2, prng);
  const std::vector<Vec> ps = sample_uniform(poly, 20000, rng);
  const TvEstimate pe = tv_to_uniform(ps, poly, 6, {50000, 3});
  CHECK(pe.value <= pe.noise_floor() + pe.ci_halfwidth);

  const TvEstimate ks = marginal_ks_proxy(s, box, 4);
  CHECK(ks.value <= ks.bias + ks.ci_halfwidth);

  Vec out(2);
  out << 2.0, 0.0;
  std::vector<Vec> bad = {out};
  CHECK_THROWS(tv_to_uniform(bad, box, 4));
}

TEST_CASE("a concentrated law is far from uniform") {
  const ConvexBody box = ConvexBody::cube(2);
  Rng rng(3);
  std::vector<Vec> s;
  for (int i = 0; i < 20000; ++i) s.push_back(0.5 * exact_uniform_sample(box, rng));
  // Mass 1 on a quarter of the area: TV = 3/4, and gauge^2 <= 1/4.
  CHECK(tv_to_uniform(s, box, 4).value == doctest::Approx(0.75).epsilon(0.01));
  CHECK(gauge_tv_to_uniform(s, box, 32).value == doctest::Approx(0.75).epsilon(0.02));
}

TEST_CASE("empirical mixing time") {
  const ConvexBody box = ConvexBody::cube(2);
  const MixingReport r =
      mixing_time_empirical(chr_scheme(), box, 4.0, 0.25, {1, 2, 5, 10, 20}, 5000, 7);
  REQUIRE(r.estimates.size() == 5);
  CHECK(r.reached());
  CHECK(r.estimates.front().value > r.estimates.back().value);

  const MixingReport never =
      mixing_time_empirical(chr_scheme(), box, 4.0, 1e-4, {1, 2}, 1000, 7);
  CHECK_FALSE(never.reached());

  std::ostringstream os;
  write_mixing_csv(os, r);
  CHECK(os.str().rfind("checkpoint,tv_estimate,ci,pass\n", 0) == 0);

  CHECK_THROWS(mixing_time_empirical(chr_scheme(), box, 4.0, 0.25, {2, 1}, 10, 7));
  CHECK_THROWS(mixing_time_empirical(chr_scheme(), box, 4.0, 0.25, {1}, 1, 7));

  // Same seed, same estimates.
  const MixingReport again =
      mixing_time_empirical(chr_scheme(), box, 4.0, 0.25, {1, 2, 5, 10, 20}, 5000, 7);
  CHECK(again.estimates.back().value == r.estimates.back().value);
}

TEST_CASE("autocorrelation") {
  Trajectory t;
  for (int i = 0; i < 100; ++i) {
    t.step.push_back(i);
    t.states.push_back(Vec::Constant(1, i % 2 ? 1.0 : -1.0));
  }
  const auto acf = autocorrelation(t, 0, 2);
  REQUIRE(acf.size() == 3);
  CHECK(acf[0] == doctest::Approx(1.0));
  CHECK(acf[1] == doctest::Approx(-0.99));
  CHECK(acf[2] == doctest::Approx(0.98));
}

TEST_CASE("coupling check at a small sample size") {
  CouplingOptions o;
  o.samples = 20000;
  o.seed = 5;
  const CouplingReport r = coupling_check(o);
  CHECK(r.tau == 28);
  CHECK(r.bound == doctest::Approx(2.0 / 32));
  CHECK(r.rejection_frequency == 0.0);
  CHECK(r.rejection_verdict == Verdict::pass);
  CHECK(r.verdict == Verdict::pass);

  // Few samples on a fine grid: the noise floor swamps the bound.
  o.samples = 200;
  o.bins_per_axis = 20;
  const CouplingReport thin = coupling_check(o);
  CHECK(thin.verdict == Verdict::inconclusive);
  CHECK(thin.detail.find("noise floor") != std::string::npos);

  CouplingOptions shallow;
  shallow.sigma = 0.02;  // 100 sigma ln 2 = 1.39 exceeds the half-width
  try {
    coupling_check(shallow);
    FAIL("expected a throw");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("hypothesis vacuous") != std::string::npos);
  }
}

TEST_CASE("two-start check") {
  CouplingOptions o;
  o.samples = 20000;
  o.seed = 6;
  Vec offset(2);
  offset << 1e-3 * std::cos(0.3), 1e-3 * std::sin(0.3);
  const TwoStartReport r = two_start_check(o, offset);
  CHECK(r.verdict == Verdict::pass);
  CHECK(r.tv.value <= 0.75);
  CHECK(r.aggregated_tv <= 0.5);
  CHECK_THROWS(two_start_check(o, 2.0 * offset));
  CHECK_THROWS(two_start_check(o, Vec::Zero(3)));
}
