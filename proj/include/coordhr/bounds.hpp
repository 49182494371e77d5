#pragma once

#include <string>
#include <vector>

namespace coordhr {

/// The analysis proves these constants exist without giving values; all
/// default to 1 and results that use them are shape-only.
struct BoundConstants {
  double C_main = 1.0;
  double c_cond = 1.0;
  double c_flow = 1.0;
};

struct BoundParams {
  int n = 2;
  double R = 1.0;
  double M = 1.0;
  double eps = 0.25;
  double s = 0.25;
  double sigma = 1e-3;
  BoundConstants constants{};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// ceil(C M^4 R^4 n^7 ln^6 n ln(2M/eps) / eps^4), as an integral double.
double theorem_main_bound(int n, double R, double M, double eps, double C_main = 1.0);
double theorem_main_bound(const BoundParams& params);

/// (1 + (1 - phi_s^2/2)^k / s) * h_s.
double ls_mixing_estimate(double h_s, double phi_s, double s, int k);

/// c s^2 / (R^2 n^3.5 ln^3 n).
double s_conductance_lower_bound(double s, double R, int n, double c_cond = 1.0);

/// sigma sqrt(pi) / (R sqrt 2): one-step CHR flow over one-step Gaussian flow.
double flow_comparison_factor(double sigma, double R);
/// The same factor written as sqrt(2 pi) sigma / (2R).
double flow_comparison_density_floor(double sigma, double R);

/// 1 / tau: single-step Gaussian flow over tau-step flow.
double multi_step_flow_comparison(double tau);

/// (c sigma / (R sqrt n)) (min(measure_S, measure_complement) - eps), clamped
/// at 0. Throws std::domain_error outside the small-step regime
/// (eps >= 1/2 or 100 n sigma ln n >= 1/2).
double gaussian_flow_lower_bound(double sigma, double R, int n, double eps, double measure_S,
                                 double measure_complement, double c_flow = 1.0);

/// c_cond obtained by chaining the three flow comparisons with
/// sigma = s / (100 n ln n) and tau = 20 n ln n (no rounding).
double composed_conductance_constant(double c_flow);

struct BoundRow {
  std::string name;
  std::string tag;
  double value = 0.0;
  std::string note;
};

/// Every calculator evaluated at `params`.
std::vector<BoundRow> bounds_table(const BoundParams& params);

}  // namespace coordhr
