#include "coordhr/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "coordhr/numeric.hpp"

namespace coordhr {

MultiIndex::MultiIndex(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("MultiIndex: empty");
  for (int c : counts_) {
    if (c < 0) throw std::invalid_argument("MultiIndex: negative count");
  }
  tau_ = std::accumulate(counts_.begin(), counts_.end(), 0);
}

MultiIndex::MultiIndex(std::vector<int> counts, int tau) : MultiIndex(std::move(counts)) {
  if (tau_ != tau) throw std::invalid_argument("MultiIndex: counts do not sum to tau");
}

bool MultiIndex::full_rank() const {
  return std::all_of(counts_.begin(), counts_.end(), [](int c) { return c >= 1; });
}

double log_lambda_weight(const MultiIndex& I, int n) {
  if (I.dim() != n) throw std::invalid_argument("lambda_weight: index has wrong dimension");
  double lw = log_factorial(I.tau()) - I.tau() * std::log(static_cast<double>(n));
  for (int c : I.counts()) lw -= log_factorial(c);
  return lw;
}

double lambda_weight(const MultiIndex& I, int n) { return std::exp(log_lambda_weight(I, n)); }

double multi_index_count(int n, int tau, bool full_rank_only) {
  if (n < 1 || tau < 0) throw std::invalid_argument("multi_index_count: need n >= 1, tau >= 0");
  if (full_rank_only) return tau < n ? 0.0 : binomial(tau - 1, n - 1);
  return binomial(tau + n - 1, n - 1);
}

namespace {

void compose(std::vector<int>& counts, int pos, int remaining, int floor,
             const std::function<void(const MultiIndex&)>& visit) {
  const int n = static_cast<int>(counts.size());
  if (pos == n - 1) {
    counts[pos] = remaining;
    visit(MultiIndex(counts));
    return;
  }
  const int reserve = floor * (n - 1 - pos);
  for (int c = remaining - reserve; c >= floor; --c) {
    counts[pos] = c;
    compose(counts, pos + 1, remaining - c, floor, visit);
  }
}

}  // namespace

void for_each_multi_index(int n, int tau, bool full_rank_only,
                          const std::function<void(const MultiIndex&)>& visit,
                          std::size_t cap) {
  const double count = multi_index_count(n, tau, full_rank_only);
  if (count > static_cast<double>(cap)) {
    throw std::length_error("enumerate_multi_indices: " + std::to_string(count) +
                            " indices exceed the cap; use sample_multi_index instead");
  }
  if (count == 0.0) return;
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  compose(counts, 0, tau, full_rank_only ? 1 : 0, visit);
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int tau, bool full_rank_only,
                                                std::size_t cap) {
  std::vector<MultiIndex> out;
  for_each_multi_index(
      n, tau, full_rank_only, [&out](const MultiIndex& I) { out.push_back(I); }, cap);
  return out;
}

MultiIndex sample_multi_index(int n, int tau, Rng& rng) {
  if (n < 1 || tau < 0) throw std::invalid_argument("sample_multi_index: need n >= 1, tau >= 0");
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (int t = 0; t < tau; ++t) ++counts[rng.index(static_cast<std::size_t>(n))];
  return MultiIndex(std::move(counts));
}

MultiIndex sample_full_rank_multi_index(int n, int tau, Rng& rng) {
  if (tau < n) throw std::invalid_argument("sample_full_rank_multi_index: tau < n");
  if (non_full_rank_mass(n, tau).exact > 1.0 - 1e-6) {
    throw std::invalid_argument("sample_full_rank_multi_index: full-rank mass too small");
  }
  for (;;) {
    MultiIndex I = sample_multi_index(n, tau, rng);
    if (I.full_rank()) return I;
  }
}

Vec GaussianComponent::sample(Rng& rng) const {
  Vec x = center;
  for (int j = 0; j < index.dim(); ++j) {
    x(j) += sigma * std::sqrt(static_cast<double>(index[j])) * rng.normal();
  }
  return x;
}

namespace {

double component_log_density(const Vec& center, double sigma, const MultiIndex& I,
                             const Vec& x) {
  double ld = 0.0;
  for (int j = 0; j < I.dim(); ++j) {
    ld += normal_log_pdf(x(j), center(j), I[j] * sigma * sigma);
  }
  return ld;
}

void check_mixture_args(const Vec& center, double sigma, int tau) {
  if (!(sigma > 0.0)) throw std::invalid_argument("mixture: sigma must be positive");
  if (tau < 0) throw std::invalid_argument("mixture: tau must be >= 0");
  if (center.size() < 1) throw std::invalid_argument("mixture: empty center");
}

}  // namespace

DensityEstimate mixture_log_density(const Vec& center, double sigma, int tau, const Vec& x,
                                    const DensityMode& mode) {
  check_mixture_args(center, sigma, tau);
  const int n = static_cast<int>(center.size());
  if (x.size() != n) throw std::invalid_argument("mixture_log_density: dimension mismatch");
  if (tau < n) return {-std::numeric_limits<double>::infinity(), 0.0};

  if (std::holds_alternative<ExactEnumeration>(mode)) {
    std::vector<double> terms;
    for_each_multi_index(n, tau, true, [&](const MultiIndex& I) {
      terms.push_back(log_lambda_weight(I, n) + component_log_density(center, sigma, I, x));
    });
    return {log_sum_exp(terms), 0.0};
  }

  const auto& mc = std::get<McEstimate>(mode);
  if (mc.samples < 2) throw std::invalid_argument("mixture_log_density: need >= 2 samples");
  Rng rng(mc.seed);
  const double full_mass = 1.0 - non_full_rank_mass(n, tau).exact;
  // Densities can be tiny; work relative to the largest sampled log density.
  std::vector<double> logs(mc.samples);
  for (auto& l : logs) {
    l = component_log_density(center, sigma, sample_full_rank_multi_index(n, tau, rng), x);
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  if (!std::isfinite(top)) return {top, 0.0};
  double mean = 0.0, sq = 0.0;
  for (double l : logs) {
    const double r = std::exp(l - top);
    mean += r;
    sq += r * r;
  }
  const double m = static_cast<double>(mc.samples);
  mean /= m;
  const double var = std::max(sq / m - mean * mean, 0.0) * m / (m - 1.0);
  const double scale = full_mass * std::exp(top);
  return {std::log(full_mass) + top + std::log(mean), scale * std::sqrt(var / m)};
}

Vec sample_full_rank_mixture(const Vec& center, double sigma, int tau, Rng& rng) {
  check_mixture_args(center, sigma, tau);
  const int n = static_cast<int>(center.size());
  GaussianComponent g{center, sample_full_rank_multi_index(n, tau, rng), sigma};
  return g.sample(rng);
}

double gaussian_tv_equal_cov(const Vec& v, const Vec& u, const MultiIndex& I, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_tv_equal_cov: sigma must be positive");
  if (v.size() != u.size() || v.size() != I.dim()) {
    throw std::invalid_argument("gaussian_tv_equal_cov: dimension mismatch");
  }
  double delta2 = 0.0;
  for (int j = 0; j < I.dim(); ++j) {
    const double d = v(j) - u(j);
    if (I[j] == 0) {
      if (d != 0.0) return 1.0;
      continue;
    }
    delta2 += d * d / (I[j] * sigma * sigma);
  }
  // 2 Phi(delta/2) - 1 = erf(delta / (2 sqrt 2)).
  return std::erf(std::sqrt(delta2) / (2.0 * std::sqrt(2.0)));
}

double pinsker_bound(const Vec& v, const Vec& u, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("pinsker_bound: sigma must be positive");
  if (v.size() != u.size()) throw std::invalid_argument("pinsker_bound: dimension mismatch");
  return (v - u).norm() / (2.0 * sigma);
}

NonFullRankMass non_full_rank_mass(int n, int tau) {
  if (n < 2) throw std::invalid_argument("non_full_rank_mass: n must be >= 2");
  if (tau < 0) throw std::invalid_argument("non_full_rank_mass: tau must be >= 0");
  NonFullRankMass out;
  out.union_bound = n * std::pow(1.0 - 1.0 / n, tau);
  if (tau == 0) {
    out.exact = 1.0;
    return out;
  }
  // P[some coordinate never chosen]; terms alternate, so sum smallest first.
  CompensatedSum s;
  for (int k = n - 1; k >= 1; --k) {
    const double term = binomial(n, k) * std::pow(1.0 - static_cast<double>(k) / n, tau);
    s += (k % 2 == 1) ? term : -term;
  }
  out.exact = std::clamp(s.value(), 0.0, 1.0);
  return out;
}

double aggregated_component_tv(const Vec& v, const Vec& u, double sigma, int tau) {
  check_mixture_args(v, sigma, tau);
  const int n = static_cast<int>(v.size());
  CompensatedSum s;
  for_each_multi_index(n, tau, true, [&](const MultiIndex& I) {
    s += lambda_weight(I, n) * gaussian_tv_equal_cov(v, u, I, sigma);
  });
  return s.value();
}

void write_weights_csv(std::ostream& out, int n, int tau, bool full_rank_only) {
  for (int j = 1; j <= n; ++j) out << "i_" << j << ',';
  out << "lambda\n";
  out.precision(17);
  for_each_multi_index(n, tau, full_rank_only, [&](const MultiIndex& I) {
    for (int c : I.counts()) out << c << ',';
    out << lambda_weight(I, n) << '\n';
  });
}

}  // namespace coordhr
