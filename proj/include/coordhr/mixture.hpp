#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

#include "coordhr/geometry.hpp"
#include "coordhr/rng.hpp"

namespace coordhr {

/// Counts (i_1, ..., i_n) of axis choices over tau steps.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> counts);
  /// Also checks that the counts sum to tau.
  MultiIndex(std::vector<int> counts, int tau);

  int dim() const { return static_cast<int>(counts_.size()); }
  int tau() const { return tau_; }
  const std::vector<int>& counts() const { return counts_; }
  int operator[](std::size_t j) const { return counts_[j]; }

  /// Every coordinate was chosen at least once.
  bool full_rank() const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> counts_;
  int tau_ = 0;
};

/// log of tau! / prod(i_j!) * n^{-tau}.
double log_lambda_weight(const MultiIndex& I, int n);
double lambda_weight(const MultiIndex& I, int n);

inline constexpr std::size_t kEnumerationCap = 10'000'000;

/// Visits every composition of tau into n parts (optionally only those with
/// all parts >= 1), first coordinate descending. Throws std::length_error if
/// there are more than `cap` compositions.
void for_each_multi_index(int n, int tau, bool full_rank_only,
                          const std::function<void(const MultiIndex&)>& visit,
                          std::size_t cap = kEnumerationCap);
std::vector<MultiIndex> enumerate_multi_indices(int n, int tau, bool full_rank_only,
                                                std::size_t cap = kEnumerationCap);

/// Number of compositions: C(tau+n-1, n-1), or C(tau-1, n-1) if full rank only.
double multi_index_count(int n, int tau, bool full_rank_only);

/// Tally of tau uniform axis draws; distributed exactly as lambda.
MultiIndex sample_multi_index(int n, int tau, Rng& rng);
/// The same law conditioned on full rank (rejection).
MultiIndex sample_full_rank_multi_index(int n, int tau, Rng& rng);

/// Gaussian centered at `center` with diagonal covariance sigma^2 * I.
struct GaussianComponent {
  Vec center;
  MultiIndex index;
  double sigma;

  /// Draw; zero-count coordinates stay at the center.
  Vec sample(Rng& rng) const;
};

struct ExactEnumeration {};
struct McEstimate {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};
using DensityMode = std::variant<ExactEnumeration, McEstimate>;

struct DensityEstimate {
  double log_density = 0.0;
  double std_error = 0.0;  // of the density itself (not its log); 0 when exact
};

/// log sum over full-rank I of lambda_I * N(x; center, sigma^2 diag(I)).
DensityEstimate mixture_log_density(const Vec& center, double sigma, int tau, const Vec& x,
                                    const DensityMode& mode = ExactEnumeration{});

/// Draw from the full-rank mixture normalized to a probability law.
Vec sample_full_rank_mixture(const Vec& center, double sigma, int tau, Rng& rng);

/// Exact TV between N(v, sigma^2 diag(I)) and N(u, sigma^2 diag(I)).
double gaussian_tv_equal_cov(const Vec& v, const Vec& u, const MultiIndex& I, double sigma);

/// ||v - u||_2 / (2 sigma); not clamped to 1.
double pinsker_bound(const Vec& v, const Vec& u, double sigma);

struct NonFullRankMass {
  double union_bound = 0.0;  // n (1 - 1/n)^tau
  double exact = 0.0;        // inclusion-exclusion
};

NonFullRankMass non_full_rank_mass(int n, int tau);

/// sum over full-rank I of lambda_I * TV(G_{v,I}, G_{u,I}).
double aggregated_component_tv(const Vec& v, const Vec& u, double sigma, int tau);

/// CSV dump: i_1..i_n,lambda.
void write_weights_csv(std::ostream& out, int n, int tau, bool full_rank_only);

}  // namespace coordhr
