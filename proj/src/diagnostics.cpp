#include "coordhr/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "coordhr/mixture.hpp"
#include "coordhr/numeric.hpp"

namespace coordhr {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "PASS";
    case Verdict::fail: return "FAIL";
    case Verdict::inconclusive: return "INCONCLUSIVE";
  }
  return "UNKNOWN";
}

namespace {

void require_in_body(std::span<const Vec> samples, const ConvexBody& body) {
  if (samples.empty()) throw std::invalid_argument("tv: empty sample set");
  for (const auto& x : samples) {
    if (!body.contains(x)) throw std::invalid_argument("tv: sample outside the body");
  }
}

}  // namespace

TvEstimate tv_to_uniform(std::span<const Vec> samples, const ConvexBody& body,
                         int bins_per_axis, const ReferenceOptions& reference) {
  require_in_body(samples, body);
  const AxisBox bb = bounding_box(body);
  const BinGrid grid(bb.lo, bb.hi, bins_per_axis);
  const std::vector<double> counts = grid.counts(samples);

  std::vector<double> mass(grid.num_cells(), 0.0);
  std::size_t reference_samples = 0;
  if (body.as_box()) {
    // The grid cells partition the box exactly.
    std::fill(mass.begin(), mass.end() - 1, 1.0);
  } else {
    Rng rng(reference.seed);
    mass = grid.counts(sample_uniform(body, reference.mc_samples, rng));
    reference_samples = reference.mc_samples;
  }
  TvEstimate est = tv_counts_vs_reference(counts, mass, reference_samples);
  est.bins = bins_per_axis;
  return est;
}

TvEstimate gauge_tv_to_uniform(std::span<const Vec> samples, const ConvexBody& body,
                               int bins) {
  require_in_body(samples, body);
  if (bins < 1) throw std::invalid_argument("gauge_tv_to_uniform: bins must be >= 1");
  const double n = body.dim();
  std::vector<double> counts(static_cast<std::size_t>(bins), 0.0);
  for (const auto& x : samples) {
    const double u = std::clamp(std::pow(gauge(body, x), n), 0.0, 1.0);
    counts[std::min(static_cast<std::size_t>(u * bins), counts.size() - 1)] += 1.0;
  }
  const std::vector<double> uniform(counts.size(), 1.0);
  TvEstimate est = tv_counts_vs_reference(counts, uniform, 0);
  est.method = TvMethod::gauge;
  est.bins = bins;
  return est;
}

TvEstimate marginal_ks_proxy(std::span<const Vec> samples, const ConvexBody& body,
                             std::uint64_t seed, std::size_t reference_samples) {
  require_in_body(samples, body);
  if (reference_samples == 0) reference_samples = samples.size();
  Rng rng(seed);
  const std::vector<Vec> ref = sample_uniform(body, reference_samples, rng);
  const double scale =
      std::sqrt(1.0 / static_cast<double>(samples.size()) + 1.0 / static_cast<double>(ref.size()));
  TvEstimate est;
  est.method = TvMethod::marginal_ks_proxy;
  est.value = max_axis_ks(samples, ref);
  est.samples = samples.size();
  est.ci_halfwidth = 1.358 * scale;          // 95% Kolmogorov quantile
  est.bias = std::sqrt(kPi / 2.0) * std::log(2.0) * scale;  // null mean of the statistic
  return est;
}

MixingReport mixing_time_empirical(const MarkovScheme& scheme, const ConvexBody& body,
                                   double M, double eps,
                                   const std::vector<std::size_t>& checkpoints,
                                   std::size_t chains, std::uint64_t seed,
                                   const MixingOptions& options) {
  if (checkpoints.empty()) throw std::invalid_argument("mixing_time: no checkpoints");
  for (std::size_t k = 1; k < checkpoints.size(); ++k) {
    if (checkpoints[k] <= checkpoints[k - 1]) {
      throw std::invalid_argument("mixing_time: checkpoints must be strictly increasing");
    }
  }
  if (!(eps > 0.0)) throw std::invalid_argument("mixing_time: eps must be positive");
  if (chains < 2) throw std::invalid_argument("mixing_time: need at least 2 chains");

  const WarmStart warm(body, M);
  const Rng root(seed);
  std::vector<std::vector<Vec>> pooled(checkpoints.size(), std::vector<Vec>(chains));
  for (std::size_t c = 0; c < chains; ++c) {
    Rng rng = root.substream(c);
    Vec x = warm.sample(rng);
    std::size_t t = 0;
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      for (; t < checkpoints[k]; ++t) scheme.advance(body, x, rng);
      pooled[k][c] = x;
    }
  }

  MixingReport report;
  report.checkpoints = checkpoints;
  report.eps = eps;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    TvEstimate est;
    switch (options.method) {
      case TvMethod::binned:
        est = tv_to_uniform(pooled[k], body,
                            options.bins ? options.bins : default_bins_per_axis(chains, body.dim()),
                            options.reference);
        break;
      case TvMethod::gauge:
        est = gauge_tv_to_uniform(pooled[k], body, options.bins ? options.bins : 32);
        break;
      case TvMethod::marginal_ks_proxy:
        est = marginal_ks_proxy(pooled[k], body, options.reference.seed);
        break;
    }
    if (!report.first_below && est.value + est.ci_halfwidth < eps) {
      report.first_below = checkpoints[k];
    }
    report.estimates.push_back(est);
  }
  return report;
}

void write_mixing_csv(std::ostream& out, const MixingReport& report) {
  out << "checkpoint,tv_estimate,ci,pass\n";
  out.precision(10);
  for (std::size_t k = 0; k < report.checkpoints.size(); ++k) {
    const TvEstimate& e = report.estimates[k];
    out << report.checkpoints[k] << ',' << e.value << ',' << e.ci_halfwidth << ','
        << (e.value + e.ci_halfwidth < report.eps ? "true" : "false") << '\n';
  }
}

std::vector<double> autocorrelation(const Trajectory& trajectory, int axis, int max_lag) {
  const std::size_t n = trajectory.size();
  if (n < 2) throw std::invalid_argument("autocorrelation: trajectory too short");
  if (max_lag < 0) throw std::invalid_argument("autocorrelation: negative lag");
  double mean = 0.0;
  for (const auto& x : trajectory.states) mean += x(axis);
  mean /= static_cast<double>(n);
  std::vector<double> acf;
  double var = 0.0;
  for (const auto& x : trajectory.states) var += (x(axis) - mean) * (x(axis) - mean);
  for (int lag = 0; lag <= max_lag && static_cast<std::size_t>(lag) < n; ++lag) {
    double s = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) {
      s += (trajectory.states[t](axis) - mean) * (trajectory.states[t + lag](axis) - mean);
    }
    acf.push_back(var > 0.0 ? s / var : 0.0);
  }
  return acf;
}

double chernoff_bound(double mu, double delta) {
  if (!(mu >= 0.0)) throw std::invalid_argument("chernoff_bound: mu must be >= 0");
  if (!(delta > 0.0)) throw std::invalid_argument("chernoff_bound: delta must be > 0");
  return std::exp(-mu * ((1.0 + delta) * std::log1p(delta) - delta));
}

double gaussian_tail_bound(double t, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_tail_bound: sigma must be > 0");
  if (!(t >= sigma)) throw std::invalid_argument("gaussian_tail_bound: requires t >= sigma");
  return std::exp(-t * t / (2.0 * sigma * sigma));
}

double pinsker_tv_bound(double kl) {
  if (!(kl >= 0.0)) throw std::invalid_argument("pinsker_tv_bound: divergence must be >= 0");
  return std::sqrt(kl / 2.0);
}

double probability_bound(const BoundQuery& query) {
  return std::visit(
      [](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, ChernoffQuery>) {
          return chernoff_bound(q.mu, q.delta);
        } else if constexpr (std::is_same_v<T, GaussianTailQuery>) {
          return gaussian_tail_bound(q.t, q.sigma);
        } else {
          return pinsker_tv_bound(q.kl);
        }
      },
      query);
}

// ---------------------------------------------------------------------------

namespace {

struct CouplingSetup {
  ConvexBody body;
  int tau;
  int bins;
};

CouplingSetup coupling_setup(const CouplingOptions& o) {
  if (o.n < 2) throw std::invalid_argument("coupling check: n must be >= 2");
  if (!(o.sigma > 0.0)) throw std::invalid_argument("coupling check: sigma must be > 0");
  if (o.samples < 2) throw std::invalid_argument("coupling check: need >= 2 samples");
  const double margin = 100.0 * o.sigma * std::log(static_cast<double>(o.n));
  if (!(o.halfwidth > margin)) {
    std::ostringstream os;
    os << "hypothesis vacuous: interior depth " << o.halfwidth
       << " does not exceed 100 sigma ln n = " << margin;
    throw std::invalid_argument(os.str());
  }
  const int tau = o.tau > 0 ? o.tau : default_tau(o.n);
  const int bins = o.bins_per_axis > 0 ? o.bins_per_axis : default_bins_per_axis(o.samples, o.n);
  return {ConvexBody::cube(o.n, o.halfwidth), tau, bins};
}

Verdict tv_verdict(const TvEstimate& tv, double bound, double slack, std::string& detail) {
  std::ostringstream os;
  if (tv.noise_floor() > bound) {
    os << "noise floor " << tv.noise_floor() << " > bound " << bound;
    detail = os.str();
    return Verdict::inconclusive;
  }
  os << "estimate " << tv.value << ", bound " << bound << ", noise floor " << tv.noise_floor();
  detail = os.str();
  return tv.value <= bound + slack ? Verdict::pass : Verdict::fail;
}

}  // namespace

CouplingReport coupling_check(const CouplingOptions& o) {
  const CouplingSetup setup = coupling_setup(o);
  const Vec v = Vec::Zero(o.n);
  const BinGrid grid =
      BinGrid::centered(v, 5.0 * o.sigma * std::sqrt(static_cast<double>(setup.tau)), setup.bins);
  const Rng root(o.seed);
  Rng walk_rng = root.substream(0);
  Rng mix_rng = root.substream(1);
  const GaussianWalkParams params{o.sigma, setup.tau};

  std::vector<double> walk_counts(grid.num_cells(), 0.0), mix_counts(grid.num_cells(), 0.0);
  std::size_t rejected = 0;
  for (std::size_t s = 0; s < o.samples; ++s) {
    const IterateResult r = gaussian_iterate(setup.body, v, params, walk_rng);
    if (r.rejected) ++rejected;
    walk_counts[grid.cell_of(r.point)] += 1.0;
    mix_counts[grid.cell_of(sample_full_rank_mixture(v, o.sigma, setup.tau, mix_rng))] += 1.0;
  }

  CouplingReport rep;
  rep.tau = setup.tau;
  rep.tv = tv_counts_two_sample(walk_counts, mix_counts);
  rep.tv.bins = setup.bins;
  rep.bound = 2.0 * std::pow(static_cast<double>(o.n), -5.0);
  rep.verdict = tv_verdict(rep.tv, rep.bound, o.multiplier * rep.tv.noise_floor(), rep.detail);

  const double N = static_cast<double>(o.samples);
  rep.rejection_frequency = static_cast<double>(rejected) / N;
  rep.rejection_std_error =
      std::sqrt(rep.rejection_frequency * (1.0 - rep.rejection_frequency) / N);
  rep.rejection_bound = 1.5 * std::pow(static_cast<double>(o.n), -5.0);
  rep.rejection_verdict =
      rep.rejection_frequency <= rep.rejection_bound + 3.0 * rep.rejection_std_error
          ? Verdict::pass
          : Verdict::fail;
  return rep;
}

TwoStartReport two_start_check(const CouplingOptions& o, const Vec& offset, int aggregate_tau) {
  const CouplingSetup setup = coupling_setup(o);
  if (offset.size() != o.n) throw std::invalid_argument("two_start_check: offset dimension");
  const double dist = offset.norm();
  if (dist > o.sigma * (1.0 + 1e-12)) {
    throw std::invalid_argument("two_start_check: ||u - v||_2 must not exceed sigma");
  }
  const Vec v = Vec::Zero(o.n);
  const Vec u = v + offset;
  const double margin = 100.0 * o.sigma * std::log(static_cast<double>(o.n));
  if (!(linf_depth(setup.body, u) > margin)) {
    throw std::invalid_argument("hypothesis vacuous: second start is not deep in the interior");
  }

  const double half = 5.0 * o.sigma * std::sqrt(static_cast<double>(setup.tau)) + dist;
  const BinGrid grid = BinGrid::centered(0.5 * (u + v), half, setup.bins);
  const Rng root(o.seed);
  Rng rv = root.substream(0);
  Rng ru = root.substream(1);
  const GaussianWalkParams params{o.sigma, setup.tau};
  std::vector<double> cv(grid.num_cells(), 0.0), cu(grid.num_cells(), 0.0);
  for (std::size_t s = 0; s < o.samples; ++s) {
    cv[grid.cell_of(gaussian_iterate(setup.body, v, params, rv).point)] += 1.0;
    cu[grid.cell_of(gaussian_iterate(setup.body, u, params, ru).point)] += 1.0;
  }

  TwoStartReport rep;
  rep.tau = setup.tau;
  rep.tv = tv_counts_two_sample(cv, cu);
  rep.tv.bins = setup.bins;
  rep.aggregate_tau = aggregate_tau;
  rep.aggregated_tv = aggregated_component_tv(v, u, o.sigma, aggregate_tau);
  rep.verdict = tv_verdict(rep.tv, rep.bound, 2.0 * rep.tv.ci_halfwidth, rep.detail);
  std::ostringstream os;
  os << "; component sum at tau=" << aggregate_tau << ": " << rep.aggregated_tv;
  rep.detail += os.str();
  if (rep.aggregated_tv > 0.5 && rep.verdict == Verdict::pass) rep.verdict = Verdict::fail;
  return rep;
}

}  // namespace coordhr
