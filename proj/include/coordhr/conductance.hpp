#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "coordhr/geometry.hpp"
#include "coordhr/histogram.hpp"
#include "coordhr/rng.hpp"

namespace coordhr {

/// Finite-state surrogate of a walk: grid-cell centers inside a body, a dense
/// row-stochastic kernel, and its stationary law.
struct DiscreteChain {
  std::vector<Vec> states;
  Eigen::MatrixXd P;
  Vec pi;

  std::size_t size() const { return static_cast<std::size_t>(pi.size()); }
  /// Same states and law with the kernel replaced (e.g. by a power of P).
  DiscreteChain with_kernel(Eigen::MatrixXd kernel) const;
};

/// Subset of states as a membership mask.
using StateSet = std::vector<bool>;

/// From a cell, pick an axis uniformly, then a uniform in-body cell on the
/// grid line through the current cell along that axis (self included).
/// Dimension must be 2 or 3.
DiscreteChain discretize_chr(const ConvexBody& body, int cells_per_axis);
DiscreteChain discretize_chr(const ConvexBody& body, const std::vector<int>& cells_per_axis);

/// Axis-aligned Gaussian proposals rounded to cells along the grid line;
/// mass that would land outside the body stays put.
DiscreteChain discretize_gaussian(const ConvexBody& body, int cells_per_axis, double sigma);

/// Chain from an explicit kernel and law, with states labelled 0..N-1 on a
/// line. Validates non-negativity and unit row sums.
DiscreteChain make_chain(Eigen::MatrixXd P, Vec pi);

Eigen::MatrixXd chain_power(const Eigen::MatrixXd& P, int k);

double max_detailed_balance_violation(const DiscreteChain& chain);
double stationarity_residual(const DiscreteChain& chain);
double max_row_sum_error(const DiscreteChain& chain);

double measure(const DiscreteChain& chain, const StateSet& A);
/// sum_{i in A} pi_i sum_{j in B} P_ij.
double ergodic_flow(const DiscreteChain& chain, const StateSet& A, const StateSet& B);
double ergodic_flow(const DiscreteChain& chain, const std::vector<std::size_t>& A,
                    const std::vector<std::size_t>& B);
/// Flow out of A: ergodic_flow(A, complement of A).
double ergodic_flow(const DiscreteChain& chain, const StateSet& A);

StateSet complement(const StateSet& A);

// ---------------------------------------------------------------------------
// s-conductance

enum class ConductanceMode { exact, sweep };

struct ConductanceOptions {
  ConductanceMode mode = ConductanceMode::exact;
  /// Also minimize over sets that split one state fractionally (exact mode).
  bool split_atoms = false;
  std::size_t random_subsets = 256;  // sweep mode
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kMaxExactStates = 22;

struct ConductanceResult {
  double value = 0.0;
  bool upper_bound = false;  // sweep mode: an upper bound on the infimum
  StateSet subset;           // minimizer (integral part when fractional)
  double subset_measure = 0.0;
  double subset_flow = 0.0;
  std::optional<std::size_t> fractional_state;  // split mode minimizer
  double fraction = 0.0;
};

/// inf over s < pi(A) <= 1/2 of flow(A) / (pi(A) - s).
/// Throws std::domain_error if no set is admissible.
ConductanceResult s_conductance(const DiscreteChain& chain, double s,
                                const ConductanceOptions& options = {});

/// sup over pi(A) <= s of |mu(A) - pi(A)|; with split_atoms, A may contain a
/// fraction of a state (fractional knapsack).
double h_s(const DiscreteChain& chain, const Vec& mu, double s, bool split_atoms = true);

/// Total variation between two laws on the states.
double tv_distance(const Vec& mu, const Vec& nu);

/// Ratio of a conductance value to s^2 / (R^2 n^3.5 ln^3 n).
double asymptotic_conductance_ratio(double phi_s, double s, double R, int n);

/// Whether the symmetrized kernel D^1/2 P D^-1/2 is positive semidefinite.
bool is_psd_kernel(const DiscreteChain& chain, double tol = 1e-12);

// ---------------------------------------------------------------------------
// Isoperimetry

using RegionFn = std::function<bool(const Vec&)>;

struct IsoperimetryOptions {
  double delta = 0.1;
  Norm norm = Norm::l2;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::size_t distance_pairs = 10000;
};

struct IsoperimetryReport {
  double between = 0.0;  // vol(K - (K1 u K2)) / vol(K)
  double between_ci = 0.0;
  double part1 = 0.0;  // vol(K1) / vol(K)
  double part2 = 0.0;
  double rhs = 0.0;    // 2 delta / (D - delta) * min(part1, part2)
  double rhs_ci = 0.0;
  double diameter = 0.0;
  bool vacuous = false;  // delta >= D
  bool pass = false;     // between + ci >= rhs - rhs_ci
  std::string detail;
};

/// Monte Carlo check of vol(K - (K1 u K2)) >= 2 delta/(D - delta) min vol(K_i)
/// for regions at distance >= delta. Throws std::domain_error if sampled
/// points of K1 and K2 are closer than delta or the regions overlap.
IsoperimetryReport isoperimetry_check(const ConvexBody& body, const RegionFn& part1,
                                      const RegionFn& part2, const IsoperimetryOptions& options);

// ---------------------------------------------------------------------------
// Overlap of transition kernels

/// Draws one transition of a kernel started at `from`.
using KernelSampler = std::function<Vec(const Vec& from, Rng& rng)>;

struct OverlapOptions {
  double r = 0.1;      // K' = robust interior K_r
  double delta = 0.1;  // pair distance (Euclidean)
  std::size_t pairs = 20;
  std::size_t samples_per_kernel = 20000;
  std::uint64_t seed = 0;
  int bins_per_axis = 0;                 // 0 selects the default
  std::optional<double> local_halfwidth; // grid around the pair instead of K's box
  double nu_threshold = 0.25;
};

struct OverlapReport {
  double max_tv = 0.0;
  double nu_estimate = 0.0;  // 1 - max_tv
  std::vector<TvEstimate> per_pair;
  std::size_t accepted_pairs = 0;
  bool pass = false;  // nu_estimate >= nu_threshold
};

OverlapReport overlap_check(const ConvexBody& body, const KernelSampler& kernel,
                            const OverlapOptions& options);

/// Exact TV between one-step coordinate hit-and-run kernels from u and v.
double chr_kernel_tv(const ConvexBody& body, const Vec& u, const Vec& v);

/// nu delta / (4 (D - delta)): the conductance floor implied by the overlap
/// property. Requires delta > 0, D >= 2 delta and 0 < nu < 1/2.
double overlap_conductance_bound(double nu, double delta, double D);

struct OverlapCertificate {
  double nu = 0.0;       // 1 - max TV over close pairs inside K'
  double delta = 0.0;
  double eps = 0.0;      // 1 - pi(K')
  StateSet kprime;
};

/// Exact overlap parameters of a discrete chain on the states in `kprime`:
/// pairs at distance <= delta in the given norm.
OverlapCertificate discrete_overlap_certificate(const DiscreteChain& chain,
                                                const StateSet& kprime, double delta,
                                                Norm norm = Norm::l2);

struct FlowBoundReport {
  double flow = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Exact flow out of A against overlap_conductance_bound * (min measure - eps).
/// Throws std::invalid_argument when the certificate has nu <= 0.
FlowBoundReport flow_vs_bound_check(const DiscreteChain& chain, const StateSet& A,
                                    const OverlapCertificate& certificate, double diameter);

}  // namespace coordhr
