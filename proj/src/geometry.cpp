#include "coordhr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "coordhr/lp.hpp"
#include "coordhr/schemes.hpp"

namespace coordhr {

std::string to_string(BodyKind kind) {
  switch (kind) {
    case BodyKind::box: return "box";
    case BodyKind::h_polytope: return "h_polytope";
    case BodyKind::euclidean_ball: return "euclidean_ball";
    case BodyKind::simplex: return "simplex";
    case BodyKind::intersection: return "intersection";
    case BodyKind::oracle: return "oracle";
  }
  return "unknown";
}

namespace {

struct Intersection {
  std::vector<ConvexBody> parts;
};

struct Oracle {
  MembershipFn member;
  Vec interior;
};

}  // namespace

struct ConvexBody::State {
  int dim = 0;
  BodyKind kind = BodyKind::box;
  double declared_R = 1.0;
  std::variant<Box, Polytope, Ball, Simplex, Intersection, Oracle> data;
};

namespace {

void check_declared_R(double R) {
  if (!(R >= 1.0) || !std::isfinite(R)) {
    throw std::invalid_argument("declared_R must be a finite real >= 1");
  }
}

void check_dim(const ConvexBody& body, const Vec& x, const char* what) {
  if (x.size() != body.dim()) {
    std::ostringstream os;
    os << what << ": dimension mismatch (body " << body.dim() << ", point "
       << x.size() << ")";
    throw std::invalid_argument(os.str());
  }
}

ConvexBody::Polytope make_polytope_data(Eigen::MatrixXd A, Vec b) {
  if (A.rows() != b.size() || A.rows() == 0) {
    throw std::invalid_argument("h_polytope: A must be m x n and b an m-vector, m >= 1");
  }
  ConvexBody::Polytope p;
  p.row_l1 = A.rowwise().lpNorm<1>();
  p.row_l2 = A.rowwise().norm();
  p.A = std::move(A);
  p.b = std::move(b);
  return p;
}

// Rejects polytopes that are empty, have empty interior, or are unbounded.
void validate_polytope(const ConvexBody::Polytope& p) {
  const int m = static_cast<int>(p.A.rows());
  const int n = static_cast<int>(p.A.cols());
  for (int i = 0; i < m; ++i) {
    if (p.row_l2(i) == 0.0 && p.b(i) < 0.0) {
      throw std::invalid_argument("h_polytope: infeasible zero row");
    }
  }
  // Chebyshev ball: max t s.t. a_i x + t ||a_i||_2 <= b_i, t <= 1.
  Eigen::MatrixXd A2(m + 1, n + 1);
  Vec b2(m + 1);
  A2.topLeftCorner(m, n) = p.A;
  A2.topRightCorner(m, 1) = p.row_l2;
  A2.bottomRows(1).setZero();
  A2(m, n) = 1.0;
  b2.head(m) = p.b;
  b2(m) = 1.0;
  Vec c = Vec::Zero(n + 1);
  c(n) = 1.0;
  const LpResult cheb = lp_maximize(c, A2, b2);
  if (cheb.status != LpStatus::optimal || cheb.value <= 1e-10) {
    throw std::invalid_argument("h_polytope: empty interior");
  }
  for (int i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec dir = Vec::Zero(n);
      dir(i) = sign;
      if (lp_maximize(dir, p.A, p.b).status != LpStatus::optimal) {
        throw std::invalid_argument("h_polytope: unbounded");
      }
    }
  }
}

// Stacked halfspace form when the body is built from boxes, simplices and
// polytopes only.
std::optional<ConvexBody::Polytope> halfspaces(const ConvexBody& body) {
  const int n = body.dim();
  if (const auto* bx = body.as_box()) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, n);
    Vec b(2 * n);
    for (int i = 0; i < n; ++i) {
      A(2 * i, i) = 1.0;
      b(2 * i) = bx->center(i) + bx->halfwidths(i);
      A(2 * i + 1, i) = -1.0;
      b(2 * i + 1) = bx->halfwidths(i) - bx->center(i);
    }
    return make_polytope_data(std::move(A), std::move(b));
  }
  if (const auto* p = body.as_polytope()) return *p;
  if (const auto* parts = body.parts()) {
    std::vector<ConvexBody::Polytope> pieces;
    Eigen::Index rows = 0;
    for (const auto& part : *parts) {
      auto h = halfspaces(part);
      if (!h) return std::nullopt;
      rows += h->A.rows();
      pieces.push_back(std::move(*h));
    }
    Eigen::MatrixXd A(rows, n);
    Vec b(rows);
    Eigen::Index r = 0;
    for (const auto& piece : pieces) {
      A.middleRows(r, piece.A.rows()) = piece.A;
      b.segment(r, piece.b.size()) = piece.b;
      r += piece.A.rows();
    }
    return make_polytope_data(std::move(A), std::move(b));
  }
  return std::nullopt;
}

bool polytope_contains(const ConvexBody::Polytope& p, const Vec& x) {
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    if (p.A.row(i).dot(x) > p.b(i)) return false;
  }
  return true;
}

ChordSegment polytope_chord(const ConvexBody::Polytope& p, const Vec& x,
                            const Vec* direction, int axis) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    const double ad = direction ? p.A.row(i).dot(*direction) : p.A(i, axis);
    if (ad == 0.0) continue;
    const double slack = p.b(i) - p.A.row(i).dot(x);
    const double t = slack / ad;
    if (ad > 0.0) {
      hi = std::min(hi, t);
    } else {
      lo = std::max(lo, t);
    }
  }
  return {std::min(lo, 0.0), std::max(hi, 0.0), ChordSegment::Exactness::exact, 0.0};
}

ChordSegment box_chord(const ConvexBody::Box& bx, const Vec& x, const Vec* direction,
                       int axis) {
  if (!direction) {
    const double c = bx.center(axis), h = bx.halfwidths(axis);
    return {std::min(c - h - x(axis), 0.0), std::max(c + h - x(axis), 0.0),
            ChordSegment::Exactness::exact, 0.0};
  }
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = (*direction)(i);
    if (d == 0.0) continue;
    const double a = (bx.center(i) - bx.halfwidths(i) - x(i)) / d;
    const double b = (bx.center(i) + bx.halfwidths(i) - x(i)) / d;
    lo = std::max(lo, std::min(a, b));
    hi = std::min(hi, std::max(a, b));
  }
  return {std::min(lo, 0.0), std::max(hi, 0.0), ChordSegment::Exactness::exact, 0.0};
}

ChordSegment ball_chord(const ConvexBody::Ball& ball, const Vec& x, const Vec* direction,
                        int axis) {
  const Vec y = x - ball.center;
  const double p = direction ? direction->dot(y) : y(axis);
  const double q = y.squaredNorm() - ball.radius * ball.radius;
  const double disc = std::sqrt(std::max(p * p - q, 0.0));
  return {std::min(-p - disc, 0.0), std::max(-p + disc, 0.0),
          ChordSegment::Exactness::exact, 0.0};
}

void check_unit(const Vec& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("chord: direction must have unit Euclidean norm");
  }
}

double bisect_extent(const ConvexBody& body, const Vec& x, const Vec& direction,
                     double limit, double tol) {
  if (body.contains(x + limit * direction)) {
    throw std::runtime_error("chord: bisection bracket not found within 2*R*sqrt(n)");
  }
  double lo = 0.0, hi = limit;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (body.contains(x + mid * direction)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

// ---------------------------------------------------------------------------
// Construction

ConvexBody::ConvexBody(std::shared_ptr<const State> state) : state_(std::move(state)) {}

ConvexBody ConvexBody::box(Vec center, Vec halfwidths, double declared_R) {
  check_declared_R(declared_R);
  if (center.size() == 0 || center.size() != halfwidths.size()) {
    throw std::invalid_argument("box: center and halfwidths must have equal nonzero size");
  }
  if (!(halfwidths.array() > 0.0).all() || !halfwidths.allFinite()) {
    throw std::invalid_argument("box: empty interior (halfwidths must be positive)");
  }
  auto s = std::make_shared<State>();
  s->dim = static_cast<int>(center.size());
  s->kind = BodyKind::box;
  s->declared_R = declared_R;
  s->data = Box{std::move(center), std::move(halfwidths)};
  return ConvexBody(std::move(s));
}

ConvexBody ConvexBody::cube(int n, double halfwidth) {
  if (n < 1) throw std::invalid_argument("cube: dimension must be >= 1");
  return box(Vec::Zero(n), Vec::Constant(n, halfwidth), std::max(1.0, halfwidth));
}

ConvexBody ConvexBody::h_polytope(Eigen::MatrixXd A, Vec b, double declared_R) {
  check_declared_R(declared_R);
  auto p = make_polytope_data(std::move(A), std::move(b));
  validate_polytope(p);
  auto s = std::make_shared<State>();
  s->dim = static_cast<int>(p.A.cols());
  s->kind = BodyKind::h_polytope;
  s->declared_R = declared_R;
  s->data = std::move(p);
  return ConvexBody(std::move(s));
}

ConvexBody ConvexBody::euclidean_ball(Vec center, double radius, double declared_R) {
  check_declared_R(declared_R);
  if (center.size() == 0) throw std::invalid_argument("ball: empty center");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball: radius must be positive");
  }
  auto s = std::make_shared<State>();
  s->dim = static_cast<int>(center.size());
  s->kind = BodyKind::euclidean_ball;
  s->declared_R = declared_R;
  s->data = Ball{std::move(center), radius};
  return ConvexBody(std::move(s));
}

ConvexBody ConvexBody::simplex(Vec corner, double scale, double declared_R) {
  check_declared_R(declared_R);
  const auto n = corner.size();
  if (n == 0) throw std::invalid_argument("simplex: empty corner");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("simplex: scale must be positive");
  }
  Eigen::MatrixXd A(n + 1, n);
  Vec b(n + 1);
  A.topRows(n) = -Eigen::MatrixXd::Identity(n, n);
  b.head(n) = -corner;
  A.row(n).setOnes();
  b(n) = scale + corner.sum();
  auto s = std::make_shared<State>();
  s->dim = static_cast<int>(n);
  s->kind = BodyKind::simplex;
  s->declared_R = declared_R;
  s->data = Simplex{std::move(corner), scale, make_polytope_data(std::move(A), std::move(b))};
  return ConvexBody(std::move(s));
}

ConvexBody ConvexBody::intersection(std::vector<ConvexBody> parts, double declared_R) {
  check_declared_R(declared_R);
  if (parts.empty()) throw std::invalid_argument("intersection: no parts");
  const int n = parts.front().dim();
  for (const auto& p : parts) {
    if (p.dim() != n) throw std::invalid_argument("intersection: dimension mismatch");
  }
  auto s = std::make_shared<State>();
  s->dim = n;
  s->kind = BodyKind::intersection;
  s->declared_R = declared_R;
  s->data = Intersection{std::move(parts)};
  ConvexBody body(std::move(s));

  if (auto h = halfspaces(body)) {
    validate_polytope(*h);
    return body;
  }
  // Mixed parts: certify an interior point among natural candidates.
  std::vector<Vec> candidates{Vec::Zero(n)};
  for (const auto& p : *body.parts()) {
    if (const auto* bx = p.as_box()) candidates.push_back(bx->center);
    if (const auto* ball = p.as_ball()) candidates.push_back(ball->center);
    const AxisBox bb = bounding_box(p);
    candidates.push_back(0.5 * (bb.lo + bb.hi));
  }
  for (const auto& c : candidates) {
    if (linf_depth(body, c) > 1e-12) return body;
  }
  throw std::invalid_argument("intersection: could not certify a nonempty interior");
}

ConvexBody ConvexBody::from_oracle(int dim, MembershipFn member, double declared_R,
                                   std::optional<Vec> interior_point) {
  check_declared_R(declared_R);
  if (dim < 1) throw std::invalid_argument("oracle body: dimension must be >= 1");
  if (!member) throw std::invalid_argument("oracle body: empty membership function");
  Vec interior = interior_point.value_or(Vec::Zero(dim));
  if (interior.size() != dim || !member(interior)) {
    throw std::invalid_argument("oracle body: interior point is not a member");
  }
  auto s = std::make_shared<State>();
  s->dim = dim;
  s->kind = BodyKind::oracle;
  s->declared_R = declared_R;
  s->data = Oracle{std::move(member), std::move(interior)};
  return ConvexBody(std::move(s));
}

// ---------------------------------------------------------------------------
// Accessors

int ConvexBody::dim() const { return state_->dim; }
BodyKind ConvexBody::kind() const { return state_->kind; }
double ConvexBody::declared_R() const { return state_->declared_R; }

bool ConvexBody::is_reference() const {
  return kind() == BodyKind::box || kind() == BodyKind::euclidean_ball ||
         kind() == BodyKind::simplex;
}

bool ConvexBody::has_exact_chords() const {
  if (kind() == BodyKind::oracle) return false;
  if (const auto* ps = parts()) {
    return std::all_of(ps->begin(), ps->end(),
                       [](const ConvexBody& p) { return p.has_exact_chords(); });
  }
  return true;
}

const ConvexBody::Box* ConvexBody::as_box() const { return std::get_if<Box>(&state_->data); }

const ConvexBody::Polytope* ConvexBody::as_polytope() const {
  if (const auto* p = std::get_if<Polytope>(&state_->data)) return p;
  if (const auto* s = std::get_if<Simplex>(&state_->data)) return &s->polytope;
  return nullptr;
}

const ConvexBody::Ball* ConvexBody::as_ball() const {
  return std::get_if<Ball>(&state_->data);
}

const ConvexBody::Simplex* ConvexBody::as_simplex() const {
  return std::get_if<Simplex>(&state_->data);
}

const std::vector<ConvexBody>* ConvexBody::parts() const {
  if (const auto* i = std::get_if<Intersection>(&state_->data)) return &i->parts;
  return nullptr;
}

ConvexBody ConvexBody::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("scaled: factor must be positive");
  }
  const double R = std::max(1.0, declared_R() * factor);
  switch (kind()) {
    case BodyKind::box:
      return box(as_box()->center * factor, as_box()->halfwidths * factor, R);
    case BodyKind::h_polytope:
      return h_polytope(as_polytope()->A, as_polytope()->b * factor, R);
    case BodyKind::euclidean_ball:
      return euclidean_ball(as_ball()->center * factor, as_ball()->radius * factor, R);
    case BodyKind::simplex:
      return simplex(as_simplex()->corner * factor, as_simplex()->scale * factor, R);
    case BodyKind::intersection: {
      std::vector<ConvexBody> scaled_parts;
      for (const auto& p : *parts()) scaled_parts.push_back(p.scaled(factor));
      return intersection(std::move(scaled_parts), R);
    }
    case BodyKind::oracle: {
      const auto& o = std::get<Oracle>(state_->data);
      MembershipFn inner = o.member;
      return from_oracle(
          dim(), [inner, factor](const Vec& x) { return inner(x / factor); }, R,
          o.interior * factor);
    }
  }
  throw std::logic_error("scaled: unknown body kind");
}

bool ConvexBody::contains(const Vec& x) const {
  check_dim(*this, x, "contains");
  return std::visit(
      [&x](const auto& d) -> bool {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Box>) {
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (std::abs(x(i) - d.center(i)) > d.halfwidths(i)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, Polytope>) {
          return polytope_contains(d, x);
        } else if constexpr (std::is_same_v<T, Ball>) {
          return (x - d.center).squaredNorm() <= d.radius * d.radius;
        } else if constexpr (std::is_same_v<T, Simplex>) {
          return polytope_contains(d.polytope, x);
        } else if constexpr (std::is_same_v<T, Intersection>) {
          return std::all_of(d.parts.begin(), d.parts.end(),
                             [&x](const ConvexBody& p) { return p.contains(x); });
        } else {
          return d.member(x);
        }
      },
      state_->data);
}

// ---------------------------------------------------------------------------
// Chords

bool contains(const ConvexBody& body, const Vec& x) { return body.contains(x); }

namespace {

ChordSegment structured_chord(const ConvexBody& body, const Vec& x, const Vec* direction,
                              int axis) {
  if (const auto* bx = body.as_box()) return box_chord(*bx, x, direction, axis);
  if (const auto* p = body.as_polytope()) return polytope_chord(*p, x, direction, axis);
  if (const auto* ball = body.as_ball()) return ball_chord(*ball, x, direction, axis);
  const auto* parts = body.parts();
  ChordSegment out{-std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), ChordSegment::Exactness::exact,
                   0.0};
  for (const auto& part : *parts) {
    const ChordSegment c = structured_chord(part, x, direction, axis);
    out.t_lo = std::max(out.t_lo, c.t_lo);
    out.t_hi = std::min(out.t_hi, c.t_hi);
  }
  return out;
}

}  // namespace

ChordSegment chord(const ConvexBody& body, const Vec& x, const Vec& direction) {
  check_dim(body, x, "chord");
  check_dim(body, direction, "chord");
  check_unit(direction);
  if (!body.contains(x)) throw std::invalid_argument("chord: base point is not in the body");
  if (!body.has_exact_chords()) return bisection_chord(body, x, direction);
  return structured_chord(body, x, &direction, 0);
}

ChordSegment axis_chord(const ConvexBody& body, const Vec& x, int axis) {
  check_dim(body, x, "axis_chord");
  if (axis < 0 || axis >= body.dim()) throw std::invalid_argument("axis_chord: bad axis");
  if (!body.contains(x)) {
    throw std::invalid_argument("axis_chord: base point is not in the body");
  }
  if (!body.has_exact_chords()) {
    Vec e = Vec::Zero(body.dim());
    e(axis) = 1.0;
    return bisection_chord(body, x, e);
  }
  return structured_chord(body, x, nullptr, axis);
}

ChordSegment bisection_chord(const ConvexBody& body, const Vec& x, const Vec& direction) {
  check_dim(body, x, "bisection_chord");
  check_dim(body, direction, "bisection_chord");
  check_unit(direction);
  if (!body.contains(x)) {
    throw std::invalid_argument("bisection_chord: base point is not in the body");
  }
  const double limit = 2.0 * body.declared_R() * std::sqrt(static_cast<double>(body.dim()));
  const double tol = kChordTolerance * body.declared_R();
  const double hi = bisect_extent(body, x, direction, limit, tol);
  const double lo = -bisect_extent(body, x, -direction, limit, tol);
  return {lo, hi, ChordSegment::Exactness::bisection, tol};
}

// ---------------------------------------------------------------------------
// Robust interior, depth, gauge

bool robust_interior_contains(const ConvexBody& body, const Vec& x, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("robust_interior_contains: r must be > 0");
  check_dim(body, x, "robust_interior_contains");
  if (const auto* bx = body.as_box()) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      if (std::abs(x(i) - bx->center(i)) + r > bx->halfwidths(i)) return false;
    }
    return true;
  }
  if (const auto* p = body.as_polytope()) {
    for (Eigen::Index i = 0; i < p->A.rows(); ++i) {
      if (p->A.row(i).dot(x) + r * p->row_l1(i) > p->b(i)) return false;
    }
    return true;
  }
  if (const auto* ball = body.as_ball()) {
    const Vec far = (x - ball->center).cwiseAbs().array() + r;
    return far.squaredNorm() <= ball->radius * ball->radius;
  }
  if (const auto* parts = body.parts()) {
    return std::all_of(parts->begin(), parts->end(), [&](const ConvexBody& part) {
      return robust_interior_contains(part, x, r);
    });
  }
  const int n = body.dim();
  if (n > kMaxOracleVertexDim) {
    throw std::invalid_argument("robust_interior_contains: oracle bodies limited to n <= 20");
  }
  Vec v(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (int i = 0; i < n; ++i) v(i) = x(i) + ((mask >> i) & 1 ? r : -r);
    if (!body.contains(v)) return false;
  }
  return true;
}

double linf_depth(const ConvexBody& body, const Vec& x) {
  check_dim(body, x, "linf_depth");
  if (!body.contains(x)) return 0.0;
  if (const auto* bx = body.as_box()) {
    return (bx->halfwidths.array() - (x - bx->center).array().abs()).minCoeff();
  }
  if (const auto* p = body.as_polytope()) {
    double depth = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p->A.rows(); ++i) {
      if (p->row_l1(i) == 0.0) continue;
      depth = std::min(depth, (p->b(i) - p->A.row(i).dot(x)) / p->row_l1(i));
    }
    return std::max(depth, 0.0);
  }
  if (const auto* ball = body.as_ball()) {
    const Vec y = (x - ball->center).cwiseAbs();
    const double n = static_cast<double>(y.size());
    const double s = y.sum();
    const double q = y.squaredNorm() - ball->radius * ball->radius;
    return std::max((-s + std::sqrt(std::max(s * s - n * q, 0.0))) / n, 0.0);
  }
  if (const auto* parts = body.parts()) {
    double depth = std::numeric_limits<double>::infinity();
    for (const auto& part : *parts) depth = std::min(depth, linf_depth(part, x));
    return depth;
  }
  double lo = 0.0, hi = 2.0 * body.declared_R();
  const double tol = kChordTolerance * body.declared_R();
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (robust_interior_contains(body, x, mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double gauge(const ConvexBody& body, const Vec& x) {
  check_dim(body, x, "gauge");
  const int n = body.dim();
  if (const auto* bx = body.as_box()) {
    double g = 0.0;
    for (int i = 0; i < n; ++i) {
      const double up = bx->center(i) + bx->halfwidths(i);
      const double down = bx->halfwidths(i) - bx->center(i);
      if (up <= 0.0 || down <= 0.0) throw std::invalid_argument("gauge: origin not interior");
      g = std::max(g, x(i) > 0.0 ? x(i) / up : -x(i) / down);
    }
    return g;
  }
  if (const auto* p = body.as_polytope()) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < p->A.rows(); ++i) {
      if (p->row_l2(i) == 0.0) continue;
      if (p->b(i) <= 0.0) throw std::invalid_argument("gauge: origin not interior");
      g = std::max(g, p->A.row(i).dot(x) / p->b(i));
    }
    return g;
  }
  if (const auto* ball = body.as_ball()) {
    const double a = ball->radius * ball->radius - ball->center.squaredNorm();
    if (a <= 0.0) throw std::invalid_argument("gauge: origin not interior");
    const double cx = ball->center.dot(x);
    return (cx + std::sqrt(cx * cx + a * x.squaredNorm())) / a;
  }
  if (const auto* parts = body.parts()) {
    double g = 0.0;
    for (const auto& part : *parts) g = std::max(g, gauge(part, x));
    return g;
  }
  if (x.norm() == 0.0) return 0.0;
  if (!body.contains(Vec::Zero(n))) throw std::invalid_argument("gauge: origin not interior");
  // x / t in K  iff  t >= gauge(x).
  double hi = 1.0;
  while (!body.contains(x / hi)) {
    hi *= 2.0;
    if (hi > 1e300) throw std::runtime_error("gauge: origin not interior");
  }
  double lo = 0.0;
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid > 0.0 && body.contains(x / mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// ---------------------------------------------------------------------------
// Bounding boxes, diameters, sandwich

AxisBox bounding_box(const ConvexBody& body) {
  const int n = body.dim();
  if (const auto* bx = body.as_box()) {
    return {bx->center - bx->halfwidths, bx->center + bx->halfwidths};
  }
  if (const auto* ball = body.as_ball()) {
    return {ball->center.array() - ball->radius, ball->center.array() + ball->radius};
  }
  if (auto h = halfspaces(body)) {
    AxisBox out{Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
      Vec dir = Vec::Zero(n);
      dir(i) = 1.0;
      const LpResult up = lp_maximize(dir, h->A, h->b);
      const LpResult down = lp_maximize(-dir, h->A, h->b);
      if (up.status != LpStatus::optimal || down.status != LpStatus::optimal) {
        throw std::runtime_error("bounding_box: linear program failed");
      }
      out.hi(i) = up.value;
      out.lo(i) = -down.value;
    }
    return out;
  }
  if (const auto* parts = body.parts()) {
    AxisBox out{Vec::Constant(n, -std::numeric_limits<double>::infinity()),
                Vec::Constant(n, std::numeric_limits<double>::infinity())};
    for (const auto& part : *parts) {
      const AxisBox b = bounding_box(part);
      out.lo = out.lo.cwiseMax(b.lo);
      out.hi = out.hi.cwiseMin(b.hi);
    }
    return out;
  }
  return {Vec::Constant(n, -body.declared_R()), Vec::Constant(n, body.declared_R())};
}

double diameter(const ConvexBody& body, Norm norm) {
  if (const auto* bx = body.as_box()) {
    return norm == Norm::l2 ? 2.0 * bx->halfwidths.norm() : 2.0 * bx->halfwidths.maxCoeff();
  }
  if (const auto* ball = body.as_ball()) return 2.0 * ball->radius;
  const AxisBox bb = bounding_box(body);
  const Vec widths = bb.hi - bb.lo;
  return norm == Norm::l2 ? widths.norm() : widths.maxCoeff();
}

namespace {

void falsify_outer(const ConvexBody& body, SandwichReport& report, std::uint64_t seed,
                   int trials) {
  const int n = body.dim();
  const double R = body.declared_R();
  Rng rng(seed);
  const Vec origin = Vec::Zero(n);
  for (int t = 0; t < trials; ++t) {
    const Vec u = random_unit_vector(n, rng);
    Vec far;
    try {
      far = bisection_chord(body, origin, u).t_hi * u;
    } catch (const std::runtime_error&) {
      far = 2.0 * R * std::sqrt(static_cast<double>(n)) * u;
    }
    if (far.lpNorm<Eigen::Infinity>() > R * (1.0 + 1e-9)) {
      report.outer_ok = false;
      report.witness = far;
      report.detail += "outer: Monte Carlo witness outside declared_R*B_inf; ";
      return;
    }
  }
  report.outer_ok = true;
  report.outer_exact = false;
  report.detail += "outer: not falsified by Monte Carlo; ";
}

}  // namespace

SandwichReport sandwich_validate(const ConvexBody& body, std::uint64_t falsification_seed,
                                 int falsification_trials) {
  const int n = body.dim();
  const double R = body.declared_R();
  const double slack = 1e-12 * R;
  SandwichReport report;

  // Inner: B_inf ⊆ K.
  if (const auto* bx = body.as_box()) {
    report.inner_ok = ((bx->center - bx->halfwidths).array() <= -1.0).all() &&
                      ((bx->center + bx->halfwidths).array() >= 1.0).all();
  } else if (const auto* p = body.as_polytope()) {
    report.inner_ok = (p->row_l1.array() <= p->b.array()).all();
  } else if (const auto* ball = body.as_ball()) {
    const Vec far = ball->center.cwiseAbs().array() + 1.0;
    report.inner_ok = far.norm() <= ball->radius;
  } else if (const auto* parts = body.parts()) {
    report.inner_ok = true;
    for (const auto& part : *parts) {
      const SandwichReport r = sandwich_validate(part, falsification_seed, 0);
      report.inner_ok = report.inner_ok && r.inner_ok;
      report.inner_exact = report.inner_exact && r.inner_exact;
    }
  } else if (n <= kMaxOracleVertexDim) {
    report.inner_ok = robust_interior_contains(body, Vec::Zero(n), 1.0);
  } else {
    report.inner_exact = false;
    report.inner_ok = true;
    Rng rng(derive_seed(falsification_seed, {1}));
    Vec v(n);
    for (int t = 0; t < falsification_trials && report.inner_ok; ++t) {
      for (int i = 0; i < n; ++i) v(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      report.inner_ok = body.contains(v);
    }
  }
  if (!report.inner_ok) report.detail += "inner: B_inf is not contained in K; ";

  // Outer: K ⊆ R * B_inf.
  if (const auto* bx = body.as_box()) {
    report.outer_ok = true;
    for (int i = 0; i < n && report.outer_ok; ++i) {
      const double up = bx->center(i) + bx->halfwidths(i);
      const double down = bx->center(i) - bx->halfwidths(i);
      if (std::abs(up) > R + slack || std::abs(down) > R + slack) {
        report.outer_ok = false;
        Vec w = bx->center;
        w(i) = std::abs(up) >= std::abs(down) ? up : down;
        report.witness = w;
      }
    }
  } else if (const auto* ball = body.as_ball()) {
    report.outer_ok = true;
    for (int i = 0; i < n && report.outer_ok; ++i) {
      if (std::abs(ball->center(i)) + ball->radius > R + slack) {
        report.outer_ok = false;
        Vec w = ball->center;
        w(i) += ball->center(i) >= 0.0 ? ball->radius : -ball->radius;
        report.witness = w;
      }
    }
  } else if (auto h = halfspaces(body)) {
    report.outer_ok = true;
    for (int i = 0; i < n && report.outer_ok; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vec dir = Vec::Zero(n);
        dir(i) = sign;
        const LpResult r = lp_maximize(dir, h->A, h->b);
        if (r.status != LpStatus::optimal || r.value > R + slack) {
          report.outer_ok = false;
          if (r.status == LpStatus::optimal) report.witness = r.x;
          break;
        }
      }
    }
  } else {
    const AxisBox bb = bounding_box(body);
    if (body.kind() == BodyKind::intersection &&
        bb.lo.minCoeff() >= -R - slack && bb.hi.maxCoeff() <= R + slack) {
      report.outer_ok = true;
    } else {
      falsify_outer(body, report, falsification_seed, falsification_trials);
    }
  }
  if (!report.outer_ok && report.detail.find("outer") == std::string::npos) {
    report.detail += "outer: K is not contained in declared_R*B_inf; ";
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sampling

Vec exact_uniform_sample(const ConvexBody& body, Rng& rng) {
  const int n = body.dim();
  if (const auto* bx = body.as_box()) {
    Vec x(n);
    for (int i = 0; i < n; ++i) {
      x(i) = bx->center(i) + bx->halfwidths(i) * (2.0 * rng.uniform() - 1.0);
    }
    return x;
  }
  if (const auto* ball = body.as_ball()) {
    const Vec u = random_unit_vector(n, rng);
    const double radius = ball->radius * std::pow(rng.uniform(), 1.0 / n);
    return ball->center + radius * u;
  }
  if (const auto* sx = body.as_simplex()) {
    Vec e(n);
    double total = rng.exponential();
    for (int i = 0; i < n; ++i) {
      e(i) = rng.exponential();
      total += e(i);
    }
    return sx->corner + sx->scale * e / total;
  }
  throw std::invalid_argument("exact_uniform_sample: unsupported body kind " +
                              to_string(body.kind()));
}

RobustVolumeReport check_robust_interior_volume(const ConvexBody& body, double eps,
                                                std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("check_robust_interior_volume: eps must lie in (0, 1)");
  }
  if (samples < kMinRobustVolumeSamples) {
    throw std::invalid_argument(
        "check_robust_interior_volume: too few samples for the requested interval");
  }
  Rng rng(seed);
  const std::vector<Vec> points = sample_uniform(body, samples, rng);
  std::size_t inside = 0;
  for (const auto& x : points) {
    if (robust_interior_contains(body, x, eps)) ++inside;
  }
  RobustVolumeReport r;
  r.samples = samples;
  r.ratio_estimate = static_cast<double>(inside) / static_cast<double>(samples);
  // Agresti-Coull standard error keeps the interval non-degenerate at 0 and 1.
  const double nt = static_cast<double>(samples) + 4.0;
  const double pt = (static_cast<double>(inside) + 2.0) / nt;
  r.ci_halfwidth = 1.96 * std::sqrt(pt * (1.0 - pt) / nt);
  r.bound = std::pow(1.0 - eps, body.dim());
  r.pass = r.ratio_estimate + r.ci_halfwidth >= r.bound;
  return r;
}

}  // namespace coordhr
