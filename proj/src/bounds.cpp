#include "coordhr/bounds.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "coordhr/numeric.hpp"

namespace coordhr {

namespace {

void require(bool ok, const char* message) {
  if (!ok) throw std::invalid_argument(message);
}

double small_step_eps(int n, double sigma) {
  return 100.0 * n * sigma * std::log(static_cast<double>(n));
}

}  // namespace

void BoundParams::validate() const {
  require(n >= 2, "BoundParams.n: must be >= 2");
  require(R >= 1.0 && std::isfinite(R), "BoundParams.R: must be >= 1");
  require(M >= 1.0 && std::isfinite(M), "BoundParams.M: must be >= 1");
  require(eps > 0.0 && eps < 0.5, "BoundParams.eps: must lie in (0, 1/2)");
  require(s > 0.0 && s < 0.5, "BoundParams.s: must lie in (0, 1/2)");
  require(sigma > 0.0 && std::isfinite(sigma), "BoundParams.sigma: must be > 0");
  require(constants.C_main > 0.0, "BoundParams.C_main: must be > 0");
  require(constants.c_cond > 0.0, "BoundParams.c_cond: must be > 0");
  require(constants.c_flow > 0.0, "BoundParams.c_flow: must be > 0");
}

double theorem_main_bound(int n, double R, double M, double eps, double C_main) {
  require(n >= 2, "theorem_main_bound: n must be >= 2");
  require(eps > 0.0 && eps < 0.5, "theorem_main_bound: eps must lie in (0, 1/2)");
  require(R >= 1.0, "theorem_main_bound: R must be >= 1");
  require(M >= 1.0, "theorem_main_bound: M must be >= 1");
  require(C_main > 0.0, "theorem_main_bound: C must be > 0");
  const long double ln = std::log(static_cast<long double>(n));
  const long double m2 = static_cast<long double>(M) * M;
  const long double r2 = static_cast<long double>(R) * R;
  const long double e2 = static_cast<long double>(eps) * eps;
  const long double value = static_cast<long double>(C_main) * (m2 * m2) * (r2 * r2) *
                            std::pow(static_cast<long double>(n), 7.0L) * std::pow(ln, 6.0L) *
                            std::log(2.0L * M / eps) / (e2 * e2);
  if (!std::isfinite(static_cast<double>(value))) {
    throw std::overflow_error("theorem_main_bound: value exceeds double range");
  }
  return static_cast<double>(std::ceil(value));
}

double theorem_main_bound(const BoundParams& p) {
  p.validate();
  return theorem_main_bound(p.n, p.R, p.M, p.eps, p.constants.C_main);
}

double ls_mixing_estimate(double h_s, double phi_s, double s, int k) {
  require(h_s >= 0.0, "ls_mixing_estimate: H_s must be >= 0");
  require(phi_s >= 0.0 && phi_s <= 1.0, "ls_mixing_estimate: Phi_s must lie in [0, 1]");
  require(s > 0.0 && s < 0.5, "ls_mixing_estimate: s must lie in (0, 1/2)");
  require(k >= 0, "ls_mixing_estimate: k must be >= 0");
  return (1.0 + std::pow(1.0 - phi_s * phi_s / 2.0, k) / s) * h_s;
}

double s_conductance_lower_bound(double s, double R, int n, double c_cond) {
  require(s > 0.0 && s < 0.5, "s_conductance_lower_bound: s must lie in (0, 1/2)");
  require(R >= 1.0, "s_conductance_lower_bound: R must be >= 1");
  require(n >= 2, "s_conductance_lower_bound: n must be >= 2");
  require(c_cond > 0.0, "s_conductance_lower_bound: constant must be > 0");
  const double ln = std::log(static_cast<double>(n));
  return c_cond * s * s / (R * R * std::pow(static_cast<double>(n), 3.5) * ln * ln * ln);
}

double flow_comparison_factor(double sigma, double R) {
  require(sigma > 0.0, "flow_comparison_factor: sigma must be > 0");
  require(R >= 1.0, "flow_comparison_factor: R must be >= 1");
  return sigma * std::sqrt(kPi) / (R * std::sqrt(2.0));
}

double flow_comparison_density_floor(double sigma, double R) {
  require(sigma > 0.0, "flow_comparison_density_floor: sigma must be > 0");
  require(R >= 1.0, "flow_comparison_density_floor: R must be >= 1");
  return std::sqrt(2.0 * kPi) * sigma / (2.0 * R);
}

double multi_step_flow_comparison(double tau) {
  require(tau >= 1.0, "multi_step_flow_comparison: tau must be >= 1");
  return 1.0 / tau;
}

double gaussian_flow_lower_bound(double sigma, double R, int n, double eps, double measure_S,
                                 double measure_complement, double c_flow) {
  require(sigma > 0.0, "gaussian_flow_lower_bound: sigma must be > 0");
  require(R >= 1.0, "gaussian_flow_lower_bound: R must be >= 1");
  require(n >= 2, "gaussian_flow_lower_bound: n must be >= 2");
  require(c_flow > 0.0, "gaussian_flow_lower_bound: constant must be > 0");
  require(measure_S >= 0.0 && measure_complement >= 0.0 &&
              std::abs(measure_S + measure_complement - 1.0) <= 1e-9,
          "gaussian_flow_lower_bound: measures must be in [0,1] and sum to 1");
  if (!(eps >= 0.0 && eps < 0.5)) {
    throw std::domain_error("gaussian_flow_lower_bound: eps must lie in [0, 1/2)");
  }
  if (!(small_step_eps(n, sigma) < 0.5)) {
    std::ostringstream os;
    os << "gaussian_flow_lower_bound: 100 n sigma ln n = " << small_step_eps(n, sigma)
       << " is not below 1/2";
    throw std::domain_error(os.str());
  }
  const double coeff = c_flow * sigma / (R * std::sqrt(static_cast<double>(n)));
  return std::max(0.0, coeff * (std::min(measure_S, measure_complement) - eps));
}

double composed_conductance_constant(double c_flow) {
  require(c_flow > 0.0, "composed_conductance_constant: constant must be > 0");
  return c_flow * std::sqrt(kPi / 2.0) / 2e5;
}

std::vector<BoundRow> bounds_table(const BoundParams& p) {
  p.validate();
  std::vector<BoundRow> rows;
  const auto& c = p.constants;
  rows.push_back({"theorem_main_bound", "main-mixing-theorem", theorem_main_bound(p),
                  "shape-only unless C_main is pinned"});
  rows.push_back({"s_conductance_lower_bound", "s-conductance-floor",
                  s_conductance_lower_bound(p.s, p.R, p.n, c.c_cond), "shape-only"});
  rows.push_back({"flow_comparison_factor", "chr-vs-gaussian-flow",
                  flow_comparison_factor(p.sigma, p.R), "exact"});
  const double tau = std::ceil(20.0 * p.n * std::log(static_cast<double>(p.n)));
  rows.push_back({"multi_step_flow_comparison", "multi-step-flow", multi_step_flow_comparison(tau),
                  "tau = ceil(20 n ln n)"});
  const double eps_small = small_step_eps(p.n, p.sigma);
  if (eps_small < 0.5) {
    rows.push_back({"gaussian_flow_lower_bound", "gaussian-flow-floor",
                    gaussian_flow_lower_bound(p.sigma, p.R, p.n, eps_small, 0.5, 0.5, c.c_flow),
                    "balanced cut, eps = 100 n sigma ln n"});
  } else {
    rows.push_back({"gaussian_flow_lower_bound", "gaussian-flow-floor",
                    std::nan(""), "outside regime: 100 n sigma ln n >= 1/2"});
  }
  rows.push_back({"ls_mixing_estimate", "lovasz-simonovits",
                  ls_mixing_estimate(p.M * p.s, 1.0, p.s, 0), "k = 0, H_s = M s, Phi_s = 1"});
  rows.push_back({"composed_conductance_constant", "conductance-composition",
                  composed_conductance_constant(c.c_flow), "c_cond implied by c_flow"});
  return rows;
}

}  // namespace coordhr
