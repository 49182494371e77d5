#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "coordhr/geometry.hpp"

namespace coordhr {

/// Regular grid on an axis-aligned box plus one overflow cell for points
/// outside it. Fixed before any sample set is binned.
class BinGrid {
 public:
  BinGrid(Vec lo, Vec hi, int bins_per_axis);
  /// Grid centered at `center` with the given half-width on every axis.
  static BinGrid centered(const Vec& center, double halfwidth, int bins_per_axis);

  int dim() const { return static_cast<int>(lo_.size()); }
  int bins_per_axis() const { return bins_; }
  std::size_t inner_cells() const { return inner_; }
  std::size_t num_cells() const { return inner_ + 1; }
  std::size_t overflow_cell() const { return inner_; }

  std::size_t cell_of(const Vec& x) const;
  AxisBox cell_box(std::size_t cell) const;
  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }

  std::vector<double> counts(std::span<const Vec> samples) const;

 private:
  Vec lo_, hi_;
  int bins_;
  std::size_t inner_;
};

/// ceil(N^{1/(n+2)}), at least 1.
int default_bins_per_axis(std::size_t samples, int n);

enum class TvMethod { binned, marginal_ks_proxy, gauge };
std::string to_string(TvMethod method);

struct TvEstimate {
  double value = 0.0;         // plug-in estimate, clamped to [0, 1]
  double ci_halfwidth = 0.0;  // 1.96 jackknife standard errors
  double bias = 0.0;          // expected plug-in value when the laws agree
  TvMethod method = TvMethod::binned;
  int bins = 0;               // per axis (binned) or total (gauge)
  std::size_t samples = 0;

  double noise_floor() const { return bias + ci_halfwidth; }
};

/// Half L1 distance between empirical cell frequencies and fixed reference
/// cell probabilities. `reference_samples` = 0 marks the reference as exact.
TvEstimate tv_counts_vs_reference(std::span<const double> counts,
                                  std::span<const double> reference,
                                  std::size_t reference_samples = 0);

/// Two empirical histograms on the same cells.
TvEstimate tv_counts_two_sample(std::span<const double> counts_a,
                                std::span<const double> counts_b);

/// Binned TV between two sample sets on a shared grid.
TvEstimate two_sample_tv(std::span<const Vec> a, std::span<const Vec> b, const BinGrid& grid);

/// Exact two-sample Kolmogorov-Smirnov statistic.
double ks_two_sample(std::vector<double> a, std::vector<double> b);
/// Largest per-axis two-sample KS statistic.
double max_axis_ks(std::span<const Vec> a, std::span<const Vec> b);
/// One-sample KS statistic against uniform[lo, hi].
double ks_uniform(std::vector<double> values, double lo, double hi);

}  // namespace coordhr
