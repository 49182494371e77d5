#include "coordhr/lp.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace coordhr {
namespace {

constexpr double kEps = 1e-11;

// Tableau in the form  T * y = rhs, y >= 0, last column is rhs, last row is
// the objective row (reduced costs; negative entries can improve).
struct Tableau {
  Eigen::MatrixXd t;
  std::vector<int> basis;
  int rows() const { return static_cast<int>(t.rows()) - 1; }
  int cols() const { return static_cast<int>(t.cols()) - 1; }

  void pivot(int r, int c) {
    t.row(r) /= t(r, c);
    for (int i = 0; i < t.rows(); ++i) {
      if (i != r && t(i, c) != 0.0) t.row(i) -= t(i, c) * t.row(r);
    }
    basis[r] = c;
  }

  void set_objective(const Eigen::VectorXd& cost) {
    const int m = rows();
    t.row(m).setZero();
    t.row(m).head(cost.size()) = -cost.transpose();
    for (int i = 0; i < m; ++i) {
      const double coef = t(m, basis[i]);
      if (coef != 0.0) t.row(m) -= coef * t.row(i);
    }
  }

  // Returns false when unbounded.
  bool optimize(int allowed_cols) {
    const Eigen::Index m = t.rows() - 1;
    const Eigen::Index rhs = t.cols() - 1;
    for (;;) {
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (t(m, j) < -kEps) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) > kEps) best = std::min(best, t(i, rhs) / t(i, enter));
      }
      Eigen::Index leave = -1;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) > kEps && t(i, rhs) / t(i, enter) <= best + kEps &&
            (leave < 0 || basis[i] < basis[leave])) {
          leave = i;
        }
      }
      if (leave < 0) return false;
      pivot(static_cast<int>(leave), enter);
    }
  }
};

}  // namespace

LpResult lp_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  if (c.size() != n || b.size() != m) {
    throw std::invalid_argument("lp_maximize: dimension mismatch");
  }

  // Columns: x+ (n), x- (n), slack (m), artificial (one per negative rhs).
  std::vector<int> artificial_row;
  for (int i = 0; i < m; ++i) {
    if (b(i) < 0.0) artificial_row.push_back(i);
  }
  const int n_art = static_cast<int>(artificial_row.size());
  const int n_struct = 2 * n + m;
  const int n_cols = n_struct + n_art;

  Tableau tab;
  tab.t = Eigen::MatrixXd::Zero(m + 1, n_cols + 1);
  tab.basis.assign(m, -1);
  int art = 0;
  for (int i = 0; i < m; ++i) {
    const double sign = b(i) < 0.0 ? -1.0 : 1.0;
    tab.t.block(i, 0, 1, n) = sign * A.row(i);
    tab.t.block(i, n, 1, n) = -sign * A.row(i);
    tab.t(i, 2 * n + i) = sign;
    tab.t(i, n_cols) = sign * b(i);
    if (sign < 0.0) {
      tab.t(i, n_struct + art) = 1.0;
      tab.basis[i] = n_struct + art;
      ++art;
    } else {
      tab.basis[i] = 2 * n + i;
    }
  }

  if (n_art > 0) {
    Eigen::VectorXd phase1 = Eigen::VectorXd::Zero(n_cols);
    phase1.tail(n_art).setConstant(-1.0);
    tab.set_objective(phase1);
    tab.optimize(n_cols);
    if (tab.t(m, n_cols) < -1e-9) return {LpStatus::infeasible, 0.0, {}};
    // Drive remaining artificials out of the basis.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < n_struct) continue;
      for (int j = 0; j < n_struct; ++j) {
        if (std::abs(tab.t(i, j)) > kEps) {
          tab.pivot(i, j);
          break;
        }
      }
    }
  }

  Eigen::VectorXd cost = Eigen::VectorXd::Zero(n_cols);
  cost.head(n) = c;
  cost.segment(n, n) = -c;
  tab.set_objective(cost);
  if (!tab.optimize(n_struct)) return {LpStatus::unbounded, 0.0, {}};

  Eigen::VectorXd y = Eigen::VectorXd::Zero(n_cols);
  for (int i = 0; i < m; ++i) y(tab.basis[i]) = tab.t(i, n_cols);
  LpResult out;
  out.status = LpStatus::optimal;
  out.x = y.head(n) - y.segment(n, n);
  out.value = c.dot(out.x);
  return out;
}

}  // namespace coordhr
