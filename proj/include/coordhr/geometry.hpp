#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "coordhr/rng.hpp"

namespace coordhr {

using Vec = Eigen::VectorXd;

enum class BodyKind { box, h_polytope, euclidean_ball, simplex, intersection, oracle };

std::string to_string(BodyKind kind);

enum class Norm { l2, linf };

/// Axis-aligned box given by its corners.
struct AxisBox {
  Vec lo;
  Vec hi;
};

/// The parameter interval {t : x + t * direction in K}.
struct ChordSegment {
  enum class Exactness { exact, bisection };

  double t_lo = 0.0;
  double t_hi = 0.0;
  Exactness exactness = Exactness::exact;
  double tolerance = 0.0;  // endpoint tolerance, zero for exact chords

  double length() const { return t_hi - t_lo; }
};

using MembershipFn = std::function<bool(const Vec&)>;

/// A closed convex body: a membership oracle plus whatever exact structure is
/// available. Immutable after construction; copies share state.
///
/// Construction rejects bodies with empty interior or that are unbounded.
/// `declared_R` is the outer radius of the sandwich B_inf <= K <= R * B_inf;
/// it is a declaration and is only checked by sandwich_validate.
class ConvexBody {
 public:
  struct Box {
    Vec center;
    Vec halfwidths;
  };
  struct Polytope {
    Eigen::MatrixXd A;
    Vec b;
    Vec row_l1;  // ||a_i||_1
    Vec row_l2;  // ||a_i||_2
  };
  struct Ball {
    Vec center;
    double radius;
  };
  /// {x : x >= corner, sum(x - corner) <= scale}; also carries its halfspaces.
  struct Simplex {
    Vec corner;
    double scale;
    Polytope polytope;
  };

  static ConvexBody box(Vec center, Vec halfwidths, double declared_R);
  /// [-halfwidth, halfwidth]^n with declared_R = max(1, halfwidth).
  static ConvexBody cube(int n, double halfwidth = 1.0);
  static ConvexBody h_polytope(Eigen::MatrixXd A, Vec b, double declared_R);
  static ConvexBody euclidean_ball(Vec center, double radius, double declared_R);
  static ConvexBody simplex(Vec corner, double scale, double declared_R);
  static ConvexBody intersection(std::vector<ConvexBody> parts, double declared_R);
  /// Body known only through `member`. `interior_point` must satisfy it.
  static ConvexBody from_oracle(int dim, MembershipFn member, double declared_R,
                                std::optional<Vec> interior_point = std::nullopt);

  int dim() const;
  BodyKind kind() const;
  double declared_R() const;

  /// Boxes, balls and simplices have exact samplers.
  bool is_reference() const;
  /// True when every chord can be computed in closed form.
  bool has_exact_chords() const;

  const Box* as_box() const;
  const Polytope* as_polytope() const;  // h_polytope or simplex
  const Ball* as_ball() const;
  const Simplex* as_simplex() const;
  const std::vector<ConvexBody>* parts() const;

  /// factor * K (scaling about the origin).
  ConvexBody scaled(double factor) const;

  /// Closed membership; throws std::invalid_argument on dimension mismatch.
  bool contains(const Vec& x) const;

 private:
  struct State;
  explicit ConvexBody(std::shared_ptr<const State> state);
  std::shared_ptr<const State> state_;

  friend ChordSegment chord(const ConvexBody&, const Vec&, const Vec&);
  friend ChordSegment axis_chord(const ConvexBody&, const Vec&, int);
};

/// Endpoint tolerance of bisection chords, as a fraction of declared_R.
inline constexpr double kChordTolerance = 1e-9;
/// Robust-interior checks at the 2^n ∞-ball vertices are limited to this n.
inline constexpr int kMaxOracleVertexDim = 20;

bool contains(const ConvexBody& body, const Vec& x);

/// Chord through x along a unit direction. Exact for structured bodies,
/// bisection against the membership oracle otherwise.
ChordSegment chord(const ConvexBody& body, const Vec& x, const Vec& direction);
/// Chord along the coordinate axis e_axis (0-based).
ChordSegment axis_chord(const ConvexBody& body, const Vec& x, int axis);
/// Chord found by bisection against contains() only, whatever the body kind.
ChordSegment bisection_chord(const ConvexBody& body, const Vec& x,
                             const Vec& direction);

/// x + v in K for every ||v||_inf <= r.
bool robust_interior_contains(const ConvexBody& body, const Vec& x, double r);

/// sup{r : x in K_r}, the ∞-norm distance from x to the complement of K.
double linf_depth(const ConvexBody& body, const Vec& x);

/// Minkowski functional of K with respect to the origin (0 must be interior).
/// Under the uniform law on K, P[gauge <= r] = r^n.
double gauge(const ConvexBody& body, const Vec& x);

/// Tight axis-aligned bounding box (exact via linear programming for
/// polytopes; an outer box for mixed intersections and oracle bodies).
AxisBox bounding_box(const ConvexBody& body);

/// Upper bound on the diameter in the given norm; exact for boxes, balls and
/// for the ∞-norm of polytopes.
double diameter(const ConvexBody& body, Norm norm);

struct SandwichReport {
  bool inner_ok = false;  // B_inf ⊆ K
  bool outer_ok = false;  // K ⊆ declared_R * B_inf
  bool inner_exact = true;
  bool outer_exact = true;  // false when decided by Monte Carlo falsification
  std::optional<Vec> witness;  // a point of K outside declared_R * B_inf, or a
                               // vertex of B_inf outside K
  std::string detail;
};

SandwichReport sandwich_validate(const ConvexBody& body,
                                 std::uint64_t falsification_seed = 0,
                                 int falsification_trials = 4096);

/// Exact uniform sample for box, ball and simplex bodies.
Vec exact_uniform_sample(const ConvexBody& body, Rng& rng);

struct RobustVolumeReport {
  double ratio_estimate = 0.0;  // vol(K_eps) / vol(K)
  double ci_halfwidth = 0.0;    // 95% normal interval
  double bound = 0.0;           // (1 - eps)^n
  std::size_t samples = 0;
  bool pass = false;            // estimate + ci >= bound
};

inline constexpr std::size_t kMinRobustVolumeSamples = 100;

/// Monte Carlo estimate of vol(K_eps)/vol(K) against the (1-eps)^n floor.
RobustVolumeReport check_robust_interior_volume(const ConvexBody& body, double eps,
                                                std::size_t samples,
                                                std::uint64_t seed);

}  // namespace coordhr
