#include "coordhr/schemes.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "coordhr/numeric.hpp"

namespace coordhr {

namespace {

// Moves x to a uniform point of the segment x + [lo, hi] * dir. Rounding can
// put the endpoint a hair outside K, in which case t is redrawn.
void move_on_chord(const ConvexBody& body, Vec& x, const ChordSegment& seg, int axis,
                   const Vec* dir, Rng& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double t = rng.uniform(seg.t_lo, seg.t_hi);
    if (dir) {
      Vec y = x + t * *dir;
      if (body.contains(y)) {
        x = std::move(y);
        return;
      }
    } else {
      const double old = x(axis);
      x(axis) = old + t;
      if (body.contains(x)) return;
      x(axis) = old;
    }
  }
}

bool chr_advance(const ConvexBody& body, Vec& x, Rng& rng) {
  const int axis = static_cast<int>(rng.index(static_cast<std::size_t>(body.dim())));
  move_on_chord(body, x, axis_chord(body, x, axis), axis, nullptr, rng);
  return true;
}

bool hnr_advance(const ConvexBody& body, Vec& x, Rng& rng) {
  const Vec u = random_unit_vector(body.dim(), rng);
  move_on_chord(body, x, chord(body, x, u), 0, &u, rng);
  return true;
}

bool gaussian_advance(const ConvexBody& body, Vec& x, double sigma, Rng& rng) {
  const auto axis = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(body.dim())));
  const double kappa = sigma * rng.normal();
  const double old = x(axis);
  x(axis) = old + kappa;
  if (body.contains(x)) return true;
  x(axis) = old;
  return false;
}

void require_member(const ConvexBody& body, const Vec& x, const char* what) {
  if (!body.contains(x)) throw std::invalid_argument(std::string(what) + ": start point is not in K");
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("gaussian walk: sigma must be positive");
  }
}

}  // namespace

MarkovScheme::MarkovScheme(std::string name, bool reversible_wrt_uniform, StepFn step)
    : name_(std::move(name)), reversible_(reversible_wrt_uniform), step_(std::move(step)) {
  if (!step_) throw std::invalid_argument("MarkovScheme: empty step function");
}

Vec MarkovScheme::step(const ConvexBody& body, const Vec& x, Rng& rng) const {
  require_member(body, x, "step");
  Vec y = x;
  step_(body, y, rng);
  return y;
}

int default_tau(int n) {
  if (n < 1) throw std::invalid_argument("default_tau: n must be >= 1");
  return static_cast<int>(std::ceil(20.0 * n * std::log(static_cast<double>(n))));
}

Vec random_unit_vector(int n, Rng& rng) {
  Vec u(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < n; ++i) u(i) = rng.normal();
    norm = u.norm();
  }
  return u / norm;
}

Vec chr_step(const ConvexBody& body, const Vec& x, Rng& rng) {
  Vec y = x;
  chr_advance(body, y, rng);
  return y;
}

Vec hnr_step(const ConvexBody& body, const Vec& x, Rng& rng) {
  Vec y = x;
  hnr_advance(body, y, rng);
  return y;
}

Vec gaussian_step(const ConvexBody& body, const Vec& x, double sigma, Rng& rng) {
  require_sigma(sigma);
  require_member(body, x, "gaussian_step");
  Vec y = x;
  gaussian_advance(body, y, sigma, rng);
  return y;
}

IterateResult gaussian_iterate(const ConvexBody& body, const Vec& x,
                               const GaussianWalkParams& params, Rng& rng) {
  require_sigma(params.sigma);
  if (params.tau < 0) throw std::invalid_argument("gaussian_iterate: tau must be >= 0");
  require_member(body, x, "gaussian_iterate");
  IterateResult r{x, false, 0};
  for (int t = 0; t < params.tau; ++t) {
    if (!gaussian_advance(body, r.point, params.sigma, rng)) ++r.rejections;
  }
  r.rejected = r.rejections > 0;
  return r;
}

double gaussian_acceptance_probability(const ConvexBody& body, const Vec& x, int axis,
                                       double sigma) {
  require_sigma(sigma);
  const ChordSegment seg = axis_chord(body, x, axis);
  return normal_cdf(seg.t_hi / sigma) - normal_cdf(seg.t_lo / sigma);
}

MarkovScheme chr_scheme() { return {"chr", true, chr_advance}; }

MarkovScheme hnr_scheme() { return {"hnr", true, hnr_advance}; }

MarkovScheme gaussian_scheme(double sigma) {
  require_sigma(sigma);
  return {"gaussian", true, [sigma](const ConvexBody& body, Vec& x, Rng& rng) {
            return gaussian_advance(body, x, sigma, rng);
          }};
}

MarkovScheme gaussian_iterate_scheme(const GaussianWalkParams& params) {
  require_sigma(params.sigma);
  if (params.tau < 1) throw std::invalid_argument("gaussian_iterate_scheme: tau must be >= 1");
  return {"gaussian_iterate", true, [params](const ConvexBody& body, Vec& x, Rng& rng) {
            bool clean = true;
            for (int t = 0; t < params.tau; ++t) {
              clean = gaussian_advance(body, x, params.sigma, rng) && clean;
            }
            return clean;
          }};
}

// ---------------------------------------------------------------------------

WarmStart::WarmStart(ConvexBody body, double M, std::size_t aux_steps)
    : support_(body), M_(M), aux_steps_(aux_steps) {
  if (!(M >= 1.0) || !std::isfinite(M)) {
    throw std::invalid_argument("warm start: M must be a finite real >= 1");
  }
  const int n = body.dim();
  if (!body.contains(Vec::Zero(n))) {
    throw std::invalid_argument("warm start: the origin must be interior to K");
  }
  if (M > 1.0) support_ = body.scaled(std::pow(M, -1.0 / n));
  if (aux_steps_ == 0) aux_steps_ = 1000 * static_cast<std::size_t>(n);
}

Vec WarmStart::sample(Rng& rng) const {
  if (support_.is_reference()) return exact_uniform_sample(support_, rng);
  Vec x = Vec::Zero(support_.dim());
  for (std::size_t t = 0; t < aux_steps_; ++t) chr_advance(support_, x, rng);
  return x;
}

Vec warm_start_sample(const ConvexBody& body, double M, Rng& rng) {
  return WarmStart(body, M).sample(rng);
}

Trajectory run_chain(const MarkovScheme& scheme, const ConvexBody& body, const Vec& start,
                     std::size_t steps, Rng& rng, std::size_t thinning) {
  if (thinning == 0) throw std::invalid_argument("run_chain: thinning must be >= 1");
  require_member(body, start, "run_chain");
  Trajectory out;
  if (steps == 0) {
    out.step.push_back(0);
    out.states.push_back(start);
    return out;
  }
  out.step.reserve(steps / thinning);
  out.states.reserve(steps / thinning);
  Vec x = start;
  for (std::size_t t = 1; t <= steps; ++t) {
    scheme.advance(body, x, rng);
    if (t % thinning == 0) {
      out.step.push_back(t);
      out.states.push_back(x);
    }
  }
  return out;
}

std::vector<Vec> sample_uniform(const ConvexBody& body, std::size_t count, Rng& rng,
                                UniformSamplerOptions options) {
  std::vector<Vec> out;
  out.reserve(count);
  if (body.is_reference()) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(exact_uniform_sample(body, rng));
    return out;
  }
  const auto n = static_cast<std::size_t>(body.dim());
  const std::size_t burn_in = options.burn_in ? options.burn_in : 1000 * n;
  const std::size_t thinning = options.thinning ? options.thinning : 10 * n;
  Vec x = Vec::Zero(body.dim());
  if (!body.contains(x)) {
    const AxisBox bb = bounding_box(body);
    x = 0.5 * (bb.lo + bb.hi);
    if (!body.contains(x)) {
      throw std::invalid_argument("sample_uniform: no interior starting point found");
    }
  }
  for (std::size_t t = 0; t < burn_in; ++t) chr_advance(body, x, rng);
  while (out.size() < count) {
    for (std::size_t t = 0; t < thinning; ++t) chr_advance(body, x, rng);
    out.push_back(x);
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<Trajectory>& chains) {
  const Eigen::Index n =
      chains.empty() || chains.front().states.empty() ? 0 : chains.front().states.front().size();
  out << "chain_id,step";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  out << '\n';
  out.precision(17);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    for (std::size_t k = 0; k < chains[c].size(); ++k) {
      out << c << ',' << chains[c].step[k];
      for (Eigen::Index i = 0; i < chains[c].states[k].size(); ++i) {
        out << ',' << chains[c].states[k](i);
      }
      out << '\n';
    }
  }
}

}  // namespace coordhr
