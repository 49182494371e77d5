#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "coordhr/geometry.hpp"
#include "coordhr/histogram.hpp"
#include "coordhr/schemes.hpp"

namespace coordhr {

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

// ---------------------------------------------------------------------------
// Distance to the uniform law

struct ReferenceOptions {
  std::size_t mc_samples = 200000;  // for bodies other than boxes
  std::uint64_t seed = 0;
};

/// Binned TV between the empirical law of `samples` and the uniform law on
/// K, on a grid over K's bounding box. Cell masses are exact for boxes and
/// Monte Carlo otherwise. Throws if a sample lies outside K.
TvEstimate tv_to_uniform(std::span<const Vec> samples, const ConvexBody& body,
                         int bins_per_axis, const ReferenceOptions& reference = {});

/// TV between the law of gauge(x)^n and uniform[0,1], on `bins` equal-mass
/// cells. Under the uniform law on K this statistic is exactly uniform, so
/// the estimate is a lower bound on the full TV that does not degrade with n.
TvEstimate gauge_tv_to_uniform(std::span<const Vec> samples, const ConvexBody& body,
                               int bins = 32);

/// Largest per-axis KS statistic against exact uniform samples of K.
TvEstimate marginal_ks_proxy(std::span<const Vec> samples, const ConvexBody& body,
                             std::uint64_t seed, std::size_t reference_samples = 0);

// ---------------------------------------------------------------------------
// Empirical mixing time

struct MixingOptions {
  TvMethod method = TvMethod::binned;
  int bins = 0;  // per axis for binned (0 = default), total for gauge (0 = 32)
  ReferenceOptions reference{};
};

struct MixingReport {
  std::vector<std::size_t> checkpoints;
  std::vector<TvEstimate> estimates;
  double eps = 0.0;
  std::optional<std::size_t> first_below;  // first checkpoint with estimate + ci < eps

  bool reached() const { return first_below.has_value(); }
};

/// Runs `chains` independent walks (chain c uses substream c of `seed`) from
/// M-warm starts and pools the current states at each checkpoint.
MixingReport mixing_time_empirical(const MarkovScheme& scheme, const ConvexBody& body,
                                   double M, double eps,
                                   const std::vector<std::size_t>& checkpoints,
                                   std::size_t chains, std::uint64_t seed,
                                   const MixingOptions& options = {});

/// checkpoint,tv_estimate,ci,pass
void write_mixing_csv(std::ostream& out, const MixingReport& report);

/// Lag autocorrelations of one coordinate along a trajectory.
std::vector<double> autocorrelation(const Trajectory& trajectory, int axis, int max_lag);

// ---------------------------------------------------------------------------
// Tail bounds

/// exp(-mu((1+delta) ln(1+delta) - delta)) bounds P[X > (1+delta) mu].
double chernoff_bound(double mu, double delta);
/// exp(-t^2 / (2 sigma^2)) bounds P[|X| >= t] for t >= sigma.
double gaussian_tail_bound(double t, double sigma);
/// sqrt(kl / 2).
double pinsker_tv_bound(double kl);

struct ChernoffQuery {
  double mu;
  double delta;
};
struct GaussianTailQuery {
  double t;
  double sigma;
};
struct PinskerQuery {
  double kl;
};
using BoundQuery = std::variant<ChernoffQuery, GaussianTailQuery, PinskerQuery>;

double probability_bound(const BoundQuery& query);

// ---------------------------------------------------------------------------
// Coupling checks for the Gaussian walk

struct CouplingOptions {
  int n = 2;
  double sigma = 1e-3;
  double halfwidth = 1.0;  // body is [-halfwidth, halfwidth]^n
  std::size_t samples = 1000000;
  std::uint64_t seed = 0;
  int tau = 0;           // 0 selects the default
  int bins_per_axis = 0; // 0 selects the default for `samples`
  double multiplier = 3.0;
};

struct CouplingReport {
  TvEstimate tv;
  double bound = 0.0;
  double rejection_frequency = 0.0;
  double rejection_std_error = 0.0;
  double rejection_bound = 0.0;
  int tau = 0;
  Verdict verdict = Verdict::inconclusive;
  Verdict rejection_verdict = Verdict::inconclusive;
  std::string detail;
};

/// tau-step Gaussian iterate from the center vs the full-rank mixture.
/// Throws std::invalid_argument when the deep-interior hypothesis fails.
CouplingReport coupling_check(const CouplingOptions& options);

struct TwoStartReport {
  TvEstimate tv;
  double bound = 0.75;
  double aggregated_tv = 0.0;  // enumerated component-level sum at `aggregate_tau`
  int aggregate_tau = 6;
  int tau = 0;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
};

/// tau-step laws from v and from u = v + offset with ||offset||_2 <= sigma.
TwoStartReport two_start_check(const CouplingOptions& options, const Vec& offset,
                               int aggregate_tau = 6);

}  // namespace coordhr
