#pragma once

#include <cmath>
#include <span>

namespace coordhr {

inline constexpr double kPi = 3.14159265358979323846;

/// Standard normal CDF. Absolute error well below 1e-12.
double normal_cdf(double x);

/// Density of N(mean, variance) at x.
double normal_pdf(double x, double mean = 0.0, double variance = 1.0);
double normal_log_pdf(double x, double mean, double variance);

/// log(sum(exp(v))) without overflow; -inf for an empty or all -inf span.
double log_sum_exp(std::span<const double> values);

double log_factorial(long long k);
double log_binomial(long long n, long long k);
/// Binomial coefficient as a double (exact below 2^53).
double binomial(long long n, long long k);

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace coordhr
