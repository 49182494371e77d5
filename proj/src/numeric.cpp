#include "coordhr/numeric.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace coordhr {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_pdf(double x, double mean, double variance) {
  return std::exp(normal_log_pdf(x, mean, variance));
}

double normal_log_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * kPi * variance) + d * d / variance);
}

double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  CompensatedSum acc;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc.value());
}

double log_factorial(long long k) {
  if (k < 0) throw std::invalid_argument("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_binomial(long long n, long long k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial(long long n, long long k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (long long i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return r < 0x1p53 ? std::round(r) : r;
}

}  // namespace coordhr
