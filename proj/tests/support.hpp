#pragma once

// Hand-rolled generators for property tests. Each takes an Rng so a failing
// case can be replayed from its seed.

#include <cmath>
#include <vector>

#include "coordhr/geometry.hpp"
#include "coordhr/rng.hpp"

namespace testing {

using coordhr::ConvexBody;
using coordhr::Rng;
using coordhr::Vec;

inline Vec uniform_vec(int n, double lo, double hi, Rng& rng) {
  Vec v(n);
  for (int j = 0; j < n; ++j) v(j) = rng.uniform(lo, hi);
  return v;
}

inline Vec unit_vec(int n, Rng& rng) {
  Vec v(n);
  for (int j = 0; j < n; ++j) v(j) = rng.normal();
  return v / v.norm();
}

/// Polytope with B_inf inside it: random facets at distance >= ||a||_1 plus an
/// outer box of half-width R.
inline ConvexBody sandwiched_polytope(int n, Rng& rng) {
  const int m = 2 + static_cast<int>(rng.index(5));
  const double R = 1.0 + 2.0 * rng.uniform();
  Eigen::MatrixXd A(m + 2 * n, n);
  Vec b(m + 2 * n);
  for (int i = 0; i < m; ++i) {
    const Vec a = unit_vec(n, rng);
    A.row(i) = a.transpose();
    b(i) = a.lpNorm<1>() * (1.0 + rng.uniform());
  }
  for (int j = 0; j < n; ++j) {
    A.row(m + 2 * j).setZero();
    A.row(m + 2 * j + 1).setZero();
    A(m + 2 * j, j) = 1.0;
    A(m + 2 * j + 1, j) = -1.0;
    b(m + 2 * j) = R;
    b(m + 2 * j + 1) = R;
  }
  return ConvexBody::h_polytope(A, b, R);
}

/// One of box, ball, simplex or polytope, all containing B_inf.
inline ConvexBody any_body(int n, Rng& rng) {
  switch (rng.index(4)) {
    case 0: {
      const Vec half = uniform_vec(n, 1.0, 2.0, rng);
      return ConvexBody::box(Vec::Zero(n), half, half.maxCoeff());
    }
    case 1: {
      const double r = std::sqrt(static_cast<double>(n)) * rng.uniform(1.0, 1.5);
      return ConvexBody::euclidean_ball(Vec::Zero(n), r, r);
    }
    case 2: {
      const double a = rng.uniform(1.0, 1.5);
      const double scale = n * (1.0 + a) + rng.uniform(0.0, 1.0);
      return ConvexBody::simplex(Vec::Constant(n, -a), scale, scale - a);
    }
    default:
      return sandwiched_polytope(n, rng);
  }
}

/// Point of K by rejection from its bounding box.
inline Vec point_in(const ConvexBody& body, Rng& rng) {
  const auto bb = coordhr::bounding_box(body);
  for (;;) {
    Vec x(body.dim());
    for (int j = 0; j < body.dim(); ++j) x(j) = rng.uniform(bb.lo(j), bb.hi(j));
    if (body.contains(x)) return x;
  }
}

}  // namespace testing
