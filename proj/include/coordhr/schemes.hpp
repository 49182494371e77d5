#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "coordhr/geometry.hpp"
#include "coordhr/rng.hpp"

namespace coordhr {

/// Advances x in place by one transition. Returns false when a proposal was
/// rejected (the state is then unchanged); walks without rejection return true.
using StepFn = std::function<bool(const ConvexBody&, Vec&, Rng&)>;

class MarkovScheme {
 public:
  MarkovScheme(std::string name, bool reversible_wrt_uniform, StepFn step);

  const std::string& name() const { return name_; }
  bool reversible_wrt_uniform() const { return reversible_; }

  bool advance(const ConvexBody& body, Vec& x, Rng& rng) const { return step_(body, x, rng); }
  Vec step(const ConvexBody& body, const Vec& x, Rng& rng) const;

 private:
  std::string name_;
  bool reversible_;
  StepFn step_;
};

struct GaussianWalkParams {
  double sigma = 0.0;
  int tau = 0;
};

/// ceil(20 n ln n); zero for n = 1.
int default_tau(int n);

/// Uniform point on the unit sphere (normalized standard Gaussian vector).
Vec random_unit_vector(int n, Rng& rng);

/// Coordinate hit-and-run: random axis, uniform point on the axis chord.
Vec chr_step(const ConvexBody& body, const Vec& x, Rng& rng);
/// Hit-and-run with a uniformly random direction.
Vec hnr_step(const ConvexBody& body, const Vec& x, Rng& rng);
/// Random axis, Gaussian proposal along it; stays put if the proposal leaves K.
Vec gaussian_step(const ConvexBody& body, const Vec& x, double sigma, Rng& rng);

struct IterateResult {
  Vec point;
  bool rejected = false;  // at least one proposal was rejected
  int rejections = 0;
};

/// tau Gaussian steps, tracking whether any proposal was rejected.
IterateResult gaussian_iterate(const ConvexBody& body, const Vec& x,
                               const GaussianWalkParams& params, Rng& rng);

/// P[x + kappa e_axis in K] for kappa ~ N(0, sigma^2).
double gaussian_acceptance_probability(const ConvexBody& body, const Vec& x, int axis,
                                       double sigma);

MarkovScheme chr_scheme();
MarkovScheme hnr_scheme();
MarkovScheme gaussian_scheme(double sigma);
/// One transition = tau Gaussian steps.
MarkovScheme gaussian_iterate_scheme(const GaussianWalkParams& params);

/// Uniform law on M^{-1/n} K, whose density with respect to the uniform law
/// on K is exactly M on its support.
///
/// Reference bodies are sampled exactly; other bodies through an auxiliary
/// coordinate hit-and-run run of `aux_steps` steps from the origin.
class WarmStart {
 public:
  WarmStart(ConvexBody body, double M, std::size_t aux_steps = 0);

  Vec sample(Rng& rng) const;

  double M() const { return M_; }
  const ConvexBody& support() const { return support_; }
  std::size_t aux_steps() const { return aux_steps_; }

 private:
  ConvexBody support_;
  double M_;
  std::size_t aux_steps_;
};

Vec warm_start_sample(const ConvexBody& body, double M, Rng& rng);

struct Trajectory {
  std::vector<std::size_t> step;  // step index of each recorded state
  std::vector<Vec> states;

  std::size_t size() const { return states.size(); }
};

/// Runs `steps` transitions from `start` and records the state after every
/// `thinning`-th one. With steps = 0 the trajectory is just [start].
Trajectory run_chain(const MarkovScheme& scheme, const ConvexBody& body, const Vec& start,
                     std::size_t steps, Rng& rng, std::size_t thinning = 1);

struct UniformSamplerOptions {
  std::size_t burn_in = 0;   // 0 selects 1000 n
  std::size_t thinning = 0;  // 0 selects 10 n
};

/// Uniform samples from K: exact for reference bodies, thinned coordinate
/// hit-and-run from an interior point otherwise.
std::vector<Vec> sample_uniform(const ConvexBody& body, std::size_t count, Rng& rng,
                                UniformSamplerOptions options = {});

/// CSV with header chain_id,step,x_1..x_n; chains are written in index order.
void write_trajectory_csv(std::ostream& out, const std::vector<Trajectory>& chains);

}  // namespace coordhr
