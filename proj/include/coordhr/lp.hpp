#pragma once

#include <Eigen/Dense>

namespace coordhr {

enum class LpStatus { optimal, unbounded, infeasible };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  Eigen::VectorXd x;  // maximizer when status == optimal
};

/// Maximizes c^T x subject to A x <= b with x free.
///
/// Dense two-phase simplex with Bland's rule, meant for the small systems
/// that describe desk-scale polytopes (tens of constraints).
LpResult lp_maximize(const Eigen::VectorXd& c, const Eigen::MatrixXd& A,
                     const Eigen::VectorXd& b);

}  // namespace coordhr
