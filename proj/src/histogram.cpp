#include "coordhr/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "coordhr/numeric.hpp"

namespace coordhr {

namespace {

constexpr double kZ95 = 1.96;

// sqrt(2/pi): E|Z| for a standard normal Z.
const double kMeanAbsNormal = std::sqrt(2.0 / kPi);

// Jackknife variance of f over one sample whose cell counts are `counts`,
// where deleting a point from cell b changes f by `leave_one(b)`.
template <class LeaveOne>
double jackknife_variance(std::span<const double> counts, double total, LeaveOne leave_one) {
  if (total < 2.0) return 0.0;
  double mean = 0.0;
  std::vector<double> theta(counts.size(), 0.0);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0.0) continue;
    theta[b] = leave_one(b);
    mean += counts[b] * theta[b];
  }
  mean /= total;
  double ss = 0.0;
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] == 0.0) continue;
    ss += counts[b] * (theta[b] - mean) * (theta[b] - mean);
  }
  return (total - 1.0) / total * ss;
}

double sum_of(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s += x;
  return s.value();
}

}  // namespace

BinGrid::BinGrid(Vec lo, Vec hi, int bins_per_axis)
    : lo_(std::move(lo)), hi_(std::move(hi)), bins_(bins_per_axis) {
  if (lo_.size() == 0 || lo_.size() != hi_.size()) {
    throw std::invalid_argument("BinGrid: corner dimensions differ");
  }
  if (!(hi_.array() > lo_.array()).all()) throw std::invalid_argument("BinGrid: empty box");
  if (bins_ < 1) throw std::invalid_argument("BinGrid: bins_per_axis must be >= 1");
  const double cells = std::pow(static_cast<double>(bins_), static_cast<double>(lo_.size()));
  if (cells > 1e8) throw std::invalid_argument("BinGrid: too many cells");
  inner_ = static_cast<std::size_t>(std::llround(cells));
}

BinGrid BinGrid::centered(const Vec& center, double halfwidth, int bins_per_axis) {
  return BinGrid(center.array() - halfwidth, center.array() + halfwidth, bins_per_axis);
}

std::size_t BinGrid::cell_of(const Vec& x) const {
  if (x.size() != lo_.size()) throw std::invalid_argument("BinGrid: dimension mismatch");
  std::size_t cell = 0;
  for (Eigen::Index i = x.size() - 1; i >= 0; --i) {
    const double u = (x(i) - lo_(i)) / (hi_(i) - lo_(i));
    if (!(u >= 0.0 && u <= 1.0)) return inner_;
    const int k = std::min(static_cast<int>(u * bins_), bins_ - 1);
    cell = cell * static_cast<std::size_t>(bins_) + static_cast<std::size_t>(k);
  }
  return cell;
}

AxisBox BinGrid::cell_box(std::size_t cell) const {
  if (cell >= inner_) throw std::out_of_range("BinGrid: overflow cell has no box");
  AxisBox box{Vec(lo_.size()), Vec(lo_.size())};
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    const auto k = static_cast<double>(cell % static_cast<std::size_t>(bins_));
    cell /= static_cast<std::size_t>(bins_);
    const double w = (hi_(i) - lo_(i)) / bins_;
    box.lo(i) = lo_(i) + k * w;
    box.hi(i) = lo_(i) + (k + 1.0) * w;
  }
  return box;
}

std::vector<double> BinGrid::counts(std::span<const Vec> samples) const {
  std::vector<double> c(num_cells(), 0.0);
  for (const auto& x : samples) c[cell_of(x)] += 1.0;
  return c;
}

int default_bins_per_axis(std::size_t samples, int n) {
  if (n < 1) throw std::invalid_argument("default_bins_per_axis: n must be >= 1");
  const double b = std::ceil(std::pow(static_cast<double>(samples), 1.0 / (n + 2)) - 1e-9);
  return std::max(1, static_cast<int>(b));
}

std::string to_string(TvMethod method) {
  switch (method) {
    case TvMethod::binned: return "binned";
    case TvMethod::marginal_ks_proxy: return "marginal_ks_proxy";
    case TvMethod::gauge: return "gauge";
  }
  return "unknown";
}

TvEstimate tv_counts_vs_reference(std::span<const double> counts,
                                  std::span<const double> reference,
                                  std::size_t reference_samples) {
  if (counts.size() != reference.size()) {
    throw std::invalid_argument("tv: histogram sizes differ");
  }
  const double n = sum_of(counts);
  const double ref_total = sum_of(reference);
  if (n <= 0.0) throw std::invalid_argument("tv: empty sample");
  if (!(ref_total > 0.0)) throw std::invalid_argument("tv: zero total reference mass");

  std::vector<double> ref(reference.size());
  for (std::size_t b = 0; b < ref.size(); ++b) ref[b] = reference[b] / ref_total;

  CompensatedSum s;
  for (std::size_t b = 0; b < ref.size(); ++b) s += std::abs(counts[b] / n - ref[b]);
  TvEstimate est;
  est.value = std::clamp(0.5 * s.value(), 0.0, 1.0);
  est.samples = static_cast<std::size_t>(n);

  if (n >= 2.0) {
    const double alpha = 1.0 / (n - 1.0);
    CompensatedSum base;
    for (std::size_t b = 0; b < ref.size(); ++b) base += std::abs(counts[b] * alpha - ref[b]);
    const double S = base.value();
    const double var = jackknife_variance(counts, n, [&](std::size_t b) {
      return 0.5 * (S - std::abs(counts[b] * alpha - ref[b]) +
                    std::abs((counts[b] - 1.0) * alpha - ref[b]));
    });
    est.ci_halfwidth = kZ95 * std::sqrt(var);
  }

  const double inv = 1.0 / n + (reference_samples ? 1.0 / reference_samples : 0.0);
  CompensatedSum bias;
  for (double p : ref) bias += std::sqrt(p * (1.0 - p) * inv);
  est.bias = 0.5 * kMeanAbsNormal * bias.value();
  return est;
}

TvEstimate tv_counts_two_sample(std::span<const double> counts_a,
                                std::span<const double> counts_b) {
  if (counts_a.size() != counts_b.size()) {
    throw std::invalid_argument("tv: histogram sizes differ");
  }
  const double na = sum_of(counts_a);
  const double nb = sum_of(counts_b);
  if (na <= 0.0 || nb <= 0.0) throw std::invalid_argument("tv: empty sample");
  const std::size_t B = counts_a.size();

  auto total_abs = [&](double alpha, double beta) {
    CompensatedSum s;
    for (std::size_t b = 0; b < B; ++b) s += std::abs(counts_a[b] * alpha - counts_b[b] * beta);
    return s.value();
  };

  TvEstimate est;
  est.value = std::clamp(0.5 * total_abs(1.0 / na, 1.0 / nb), 0.0, 1.0);
  est.samples = static_cast<std::size_t>(std::min(na, nb));

  double var = 0.0;
  if (na >= 2.0) {
    const double alpha = 1.0 / (na - 1.0), beta = 1.0 / nb;
    const double S = total_abs(alpha, beta);
    var += jackknife_variance(counts_a, na, [&](std::size_t b) {
      return 0.5 * (S - std::abs(counts_a[b] * alpha - counts_b[b] * beta) +
                    std::abs((counts_a[b] - 1.0) * alpha - counts_b[b] * beta));
    });
  }
  if (nb >= 2.0) {
    const double alpha = 1.0 / na, beta = 1.0 / (nb - 1.0);
    const double S = total_abs(alpha, beta);
    var += jackknife_variance(counts_b, nb, [&](std::size_t b) {
      return 0.5 * (S - std::abs(counts_a[b] * alpha - counts_b[b] * beta) +
                    std::abs(counts_a[b] * alpha - (counts_b[b] - 1.0) * beta));
    });
  }
  est.ci_halfwidth = kZ95 * std::sqrt(var);

  const double inv = 1.0 / na + 1.0 / nb;
  CompensatedSum bias;
  for (std::size_t b = 0; b < B; ++b) {
    const double p = (counts_a[b] + counts_b[b]) / (na + nb);
    bias += std::sqrt(p * (1.0 - p) * inv);
  }
  est.bias = 0.5 * kMeanAbsNormal * bias.value();
  return est;
}

TvEstimate two_sample_tv(std::span<const Vec> a, std::span<const Vec> b, const BinGrid& grid) {
  TvEstimate est = tv_counts_two_sample(grid.counts(a), grid.counts(b));
  est.bins = grid.bins_per_axis();
  return est;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double max_axis_ks(std::span<const Vec> a, std::span<const Vec> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("max_axis_ks: empty sample");
  const Eigen::Index n = a.front().size();
  double d = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<double> xa, xb;
    xa.reserve(a.size());
    xb.reserve(b.size());
    for (const auto& x : a) xa.push_back(x(i));
    for (const auto& x : b) xb.push_back(x(i));
    d = std::max(d, ks_two_sample(std::move(xa), std::move(xb)));
  }
  return d;
}

double ks_uniform(std::vector<double> values, double lo, double hi) {
  if (values.empty()) throw std::invalid_argument("ks_uniform: empty sample");
  if (!(hi > lo)) throw std::invalid_argument("ks_uniform: empty interval");
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double F = std::clamp((values[k] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, (k + 1) / n - F, F - k / n});
  }
  return d;
}

}  // namespace coordhr
