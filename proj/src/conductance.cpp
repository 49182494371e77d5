#include "coordhr/conductance.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "coordhr/numeric.hpp"
#include "coordhr/schemes.hpp"

namespace coordhr {

DiscreteChain DiscreteChain::with_kernel(Eigen::MatrixXd kernel) const {
  if (kernel.rows() != P.rows() || kernel.cols() != P.cols()) {
    throw std::invalid_argument("with_kernel: shape mismatch");
  }
  return DiscreteChain{states, std::move(kernel), pi};
}

namespace {

// In-body cell centers of a regular grid over the bounding box.
struct CellGrid {
  std::vector<int> cells;
  Vec lo, width;
  std::vector<long> index_of;  // flat cell -> state, or -1
  std::vector<std::vector<int>> coords;  // per state
  std::vector<Vec> centers;

  long flat(const std::vector<int>& c) const {
    long f = 0;
    for (std::size_t a = c.size(); a-- > 0;) f = f * cells[a] + c[a];
    return f;
  }
};

CellGrid build_grid(const ConvexBody& body, const std::vector<int>& cells) {
  const int n = body.dim();
  if (n != 2 && n != 3) throw std::invalid_argument("discretize: dimension must be 2 or 3");
  if (static_cast<int>(cells.size()) != n) {
    throw std::invalid_argument("discretize: one cell count per axis required");
  }
  for (int k : cells) {
    if (k < 1) throw std::invalid_argument("discretize: cells per axis must be >= 1");
  }
  const AxisBox bb = bounding_box(body);
  CellGrid g;
  g.cells = cells;
  g.lo = bb.lo;
  g.width = bb.hi - bb.lo;
  for (int a = 0; a < n; ++a) g.width(a) /= cells[a];

  long total = 1;
  for (int k : cells) total *= k;
  g.index_of.assign(static_cast<std::size_t>(total), -1);
  std::vector<int> c(static_cast<std::size_t>(n), 0);
  for (long f = 0; f < total; ++f) {
    long rest = f;
    Vec center(n);
    for (int a = 0; a < n; ++a) {
      c[a] = static_cast<int>(rest % cells[a]);
      rest /= cells[a];
      center(a) = g.lo(a) + (c[a] + 0.5) * g.width(a);
    }
    if (body.contains(center)) {
      g.index_of[static_cast<std::size_t>(f)] = static_cast<long>(g.centers.size());
      g.centers.push_back(center);
      g.coords.push_back(c);
    }
  }
  if (g.centers.empty()) throw std::invalid_argument("discretize: no cell centers inside the body");
  if (g.centers.size() < 2) throw std::invalid_argument("discretize: fewer than 2 states");
  return g;
}

// States on the grid line through state i along axis a, with their offsets.
std::vector<std::pair<long, int>> line_through(const CellGrid& g, std::size_t i, int a) {
  std::vector<std::pair<long, int>> out;
  std::vector<int> c = g.coords[i];
  const int home = c[a];
  for (int k = 0; k < g.cells[a]; ++k) {
    c[a] = k;
    const long s = g.index_of[static_cast<std::size_t>(g.flat(c))];
    if (s >= 0) out.emplace_back(s, k - home);
  }
  return out;
}

DiscreteChain uniform_chain(CellGrid&& g, Eigen::MatrixXd P) {
  const auto N = static_cast<Eigen::Index>(g.centers.size());
  return DiscreteChain{std::move(g.centers), std::move(P),
                       Vec::Constant(N, 1.0 / static_cast<double>(N))};
}

void check_mask(const DiscreteChain& chain, const StateSet& A) {
  if (A.size() != chain.size()) throw std::out_of_range("state set size does not match chain");
}

}  // namespace

DiscreteChain discretize_chr(const ConvexBody& body, int cells_per_axis) {
  return discretize_chr(body, std::vector<int>(static_cast<std::size_t>(body.dim()), cells_per_axis));
}

DiscreteChain discretize_chr(const ConvexBody& body, const std::vector<int>& cells_per_axis) {
  CellGrid g = build_grid(body, cells_per_axis);
  const int n = body.dim();
  const auto N = static_cast<Eigen::Index>(g.centers.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (int a = 0; a < n; ++a) {
      const auto line = line_through(g, static_cast<std::size_t>(i), a);
      const double w = 1.0 / (n * static_cast<double>(line.size()));
      for (const auto& [j, offset] : line) P(i, j) += w;
    }
  }
  return uniform_chain(std::move(g), std::move(P));
}

DiscreteChain discretize_gaussian(const ConvexBody& body, int cells_per_axis, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("discretize_gaussian: sigma must be positive");
  CellGrid g = build_grid(body, std::vector<int>(static_cast<std::size_t>(body.dim()), cells_per_axis));
  const int n = body.dim();
  const auto N = static_cast<Eigen::Index>(g.centers.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    double kept = 1.0;
    for (int a = 0; a < n; ++a) {
      const double h = g.width(a);
      for (const auto& [j, offset] : line_through(g, static_cast<std::size_t>(i), a)) {
        if (j == i) continue;
        const double d = offset * h;
        const double w =
            (normal_cdf((d + 0.5 * h) / sigma) - normal_cdf((d - 0.5 * h) / sigma)) / n;
        P(i, j) += w;
        kept -= w;
      }
    }
    P(i, i) += kept;
  }
  return uniform_chain(std::move(g), std::move(P));
}

DiscreteChain make_chain(Eigen::MatrixXd P, Vec pi) {
  if (P.rows() != P.cols() || P.rows() != pi.size() || P.rows() < 2) {
    throw std::invalid_argument("make_chain: need a square kernel with >= 2 states");
  }
  if ((P.array() < 0.0).any() || (pi.array() < 0.0).any()) {
    throw std::invalid_argument("make_chain: negative entries");
  }
  if (std::abs(pi.sum() - 1.0) > 1e-12) throw std::invalid_argument("make_chain: pi must sum to 1");
  if (((P.rowwise().sum().array() - 1.0).abs() > 1e-12).any()) {
    throw std::invalid_argument("make_chain: rows must sum to 1");
  }
  std::vector<Vec> states;
  for (Eigen::Index i = 0; i < P.rows(); ++i) states.push_back(Vec::Constant(1, static_cast<double>(i)));
  return DiscreteChain{std::move(states), std::move(P), std::move(pi)};
}

Eigen::MatrixXd chain_power(const Eigen::MatrixXd& P, int k) {
  if (k < 0) throw std::invalid_argument("chain_power: negative exponent");
  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(P.rows(), P.cols());
  Eigen::MatrixXd base = P;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

double max_detailed_balance_violation(const DiscreteChain& chain) {
  const Eigen::MatrixXd W = chain.pi.asDiagonal() * chain.P;
  return (W - W.transpose()).cwiseAbs().maxCoeff();
}

double stationarity_residual(const DiscreteChain& chain) {
  const Vec flowed = chain.P.transpose() * chain.pi;
  return (flowed - chain.pi).cwiseAbs().maxCoeff();
}

double max_row_sum_error(const DiscreteChain& chain) {
  return (chain.P.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

double measure(const DiscreteChain& chain, const StateSet& A) {
  check_mask(chain, A);
  CompensatedSum s;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A[i]) s += chain.pi(static_cast<Eigen::Index>(i));
  }
  return s.value();
}

double ergodic_flow(const DiscreteChain& chain, const StateSet& A, const StateSet& B) {
  check_mask(chain, A);
  check_mask(chain, B);
  CompensatedSum s;
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (!A[i]) continue;
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < B.size(); ++j) {
      if (B[j]) s += chain.pi(ii) * chain.P(ii, static_cast<Eigen::Index>(j));
    }
  }
  return s.value();
}

double ergodic_flow(const DiscreteChain& chain, const std::vector<std::size_t>& A,
                    const std::vector<std::size_t>& B) {
  StateSet a(chain.size(), false), b(chain.size(), false);
  for (std::size_t i : A) {
    if (i >= chain.size()) throw std::out_of_range("ergodic_flow: state index out of range");
    a[i] = true;
  }
  for (std::size_t j : B) {
    if (j >= chain.size()) throw std::out_of_range("ergodic_flow: state index out of range");
    b[j] = true;
  }
  return ergodic_flow(chain, a, b);
}

double ergodic_flow(const DiscreteChain& chain, const StateSet& A) {
  return ergodic_flow(chain, A, complement(A));
}

StateSet complement(const StateSet& A) {
  StateSet c(A.size());
  for (std::size_t i = 0; i < A.size(); ++i) c[i] = !A[i];
  return c;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kMeasureTol = 1e-12;

bool admissible(double q, double s) { return q > s + kMeasureTol && q <= 0.5 + kMeasureTol; }

StateSet mask_from_bits(std::uint64_t bits, std::size_t N) {
  StateSet A(N);
  for (std::size_t i = 0; i < N; ++i) A[i] = (bits >> i) & 1U;
  return A;
}

ConductanceResult exact_conductance(const DiscreteChain& chain, double s, bool split_atoms) {
  const std::size_t N = chain.size();
  if (N > kMaxExactStates) {
    throw std::invalid_argument("s_conductance: exact mode is limited to 22 states; use sweep");
  }
  if (split_atoms && !is_psd_kernel(chain)) {
    throw std::invalid_argument("s_conductance: atom splitting requires a PSD kernel");
  }
  const auto n = static_cast<Eigen::Index>(N);
  const Eigen::MatrixXd W = chain.pi.asDiagonal() * chain.P;
  const Vec rows = W.rowwise().sum();
  Vec to_set = Vec::Zero(n);   // sum_{j in A} W(i, j)
  Vec into = Vec::Zero(n);     // sum_{i in A} W(i, j)
  double flow = 0.0, q = 0.0;
  std::uint64_t bits = 0;

  ConductanceResult best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider_integral = [&]() {
    if (admissible(q, s)) {
      const double ratio = flow / (q - s);
      if (ratio < best.value) {
        best.value = ratio;
        best.subset = mask_from_bits(bits, N);
        best.subset_measure = q;
        best.subset_flow = flow;
        best.fractional_state.reset();
        best.fraction = 0.0;
      }
    }
  };
  auto consider_split = [&]() {
    if (!(q < 0.5 - kMeasureTol) || !(0.5 > s)) return;
    for (Eigen::Index f = 0; f < n; ++f) {
      if ((bits >> f) & 1U) continue;
      const double pf = chain.pi(f);
      if (!(q + pf > 0.5 + kMeasureTol)) continue;
      const double theta = (0.5 - q) / pf;
      const double fl = flow - theta * into(f) + theta * (rows(f) - to_set(f)) -
                        theta * theta * W(f, f);
      const double ratio = fl / (0.5 - s);
      if (ratio < best.value) {
        best.value = ratio;
        best.subset = mask_from_bits(bits, N);
        best.subset_measure = 0.5;
        best.subset_flow = fl;
        best.fractional_state = static_cast<std::size_t>(f);
        best.fraction = theta;
      }
    }
  };

  if (split_atoms) consider_split();  // the empty set plus one fractional state
  const std::uint64_t total = std::uint64_t{1} << N;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto flip = static_cast<Eigen::Index>(std::countr_zero(k));
    if ((bits >> flip) & 1U) {
      flow = flow - (rows(flip) - to_set(flip)) + (into(flip) - W(flip, flip));
      q -= chain.pi(flip);
      to_set -= W.col(flip);
      into -= W.row(flip).transpose();
    } else {
      flow = flow + (rows(flip) - to_set(flip) - W(flip, flip)) - into(flip);
      q += chain.pi(flip);
      to_set += W.col(flip);
      into += W.row(flip).transpose();
    }
    bits ^= std::uint64_t{1} << flip;
    consider_integral();
    if (split_atoms) consider_split();
  }
  if (!std::isfinite(best.value)) {
    throw std::domain_error("s_conductance: no admissible subset for this s");
  }
  // Recompute the reported flow directly to shed incremental rounding.
  if (!best.fractional_state) {
    best.subset_flow = ergodic_flow(chain, best.subset);
    best.value = best.subset_flow / (best.subset_measure - s);
  }
  return best;
}

ConductanceResult sweep_conductance(const DiscreteChain& chain, double s,
                                    const ConductanceOptions& options) {
  const std::size_t N = chain.size();
  const Vec root = chain.pi.cwiseSqrt();
  const Eigen::MatrixXd S0 = root.asDiagonal() * chain.P * root.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd S = 0.5 * (S0 + S0.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  // Eigenvalues ascend; the second largest is at N - 2.
  const Vec phi = eig.eigenvectors().col(static_cast<Eigen::Index>(N) - 2).cwiseQuotient(root);

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return phi(static_cast<Eigen::Index>(a)) < phi(static_cast<Eigen::Index>(b));
  });

  ConductanceResult best;
  best.upper_bound = true;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const StateSet& A) {
    for (const StateSet& B : {A, complement(A)}) {
      const double q = measure(chain, B);
      if (!admissible(q, s)) continue;
      const double fl = ergodic_flow(chain, B);
      if (fl / (q - s) < best.value) {
        best.value = fl / (q - s);
        best.subset = B;
        best.subset_measure = q;
        best.subset_flow = fl;
      }
    }
  };
  StateSet prefix(N, false);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    prefix[order[k]] = true;
    consider(prefix);
  }
  Rng rng(options.seed);
  for (std::size_t t = 0; t < options.random_subsets; ++t) {
    StateSet A(N);
    for (std::size_t i = 0; i < N; ++i) A[i] = rng.uniform() < 0.5;
    consider(A);
  }
  if (!std::isfinite(best.value)) {
    throw std::domain_error("s_conductance: no admissible subset found for this s");
  }
  return best;
}

}  // namespace

ConductanceResult s_conductance(const DiscreteChain& chain, double s,
                                const ConductanceOptions& options) {
  if (!(s >= 0.0 && s < 0.5)) throw std::invalid_argument("s_conductance: s must lie in [0, 1/2)");
  if (options.mode == ConductanceMode::exact) {
    return exact_conductance(chain, s, options.split_atoms);
  }
  return sweep_conductance(chain, s, options);
}

double h_s(const DiscreteChain& chain, const Vec& mu, double s, bool split_atoms) {
  const std::size_t N = chain.size();
  if (static_cast<std::size_t>(mu.size()) != N) throw std::invalid_argument("h_s: size mismatch");
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("h_s: s must lie in [0, 1]");
  if (!split_atoms) {
    if (N > kMaxExactStates) throw std::invalid_argument("h_s: integral mode limited to 22 states");
    double best = 0.0;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << N); ++bits) {
      double q = 0.0, d = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        if ((bits >> i) & 1U) {
          q += chain.pi(static_cast<Eigen::Index>(i));
          d += mu(static_cast<Eigen::Index>(i)) - chain.pi(static_cast<Eigen::Index>(i));
        }
      }
      if (q <= s + kMeasureTol) best = std::max(best, std::abs(d));
    }
    return best;
  }
  double best = 0.0;
  for (double sign : {1.0, -1.0}) {
    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), 0);
    auto gain = [&](std::size_t i) {
      const auto ii = static_cast<Eigen::Index>(i);
      return sign * (mu(ii) - chain.pi(ii)) / chain.pi(ii);
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gain(a) > gain(b); });
    double capacity = s, total = 0.0;
    for (std::size_t i : order) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double d = sign * (mu(ii) - chain.pi(ii));
      if (d <= 0.0 || capacity <= 0.0) break;
      const double take = std::min(1.0, capacity / chain.pi(ii));
      total += take * d;
      capacity -= take * chain.pi(ii);
    }
    best = std::max(best, total);
  }
  return best;
}

double tv_distance(const Vec& mu, const Vec& nu) {
  if (mu.size() != nu.size()) throw std::invalid_argument("tv_distance: size mismatch");
  return 0.5 * (mu - nu).cwiseAbs().sum();
}

double asymptotic_conductance_ratio(double phi_s, double s, double R, int n) {
  if (n < 2) throw std::invalid_argument("asymptotic_conductance_ratio: n must be >= 2");
  const double ln = std::log(static_cast<double>(n));
  return phi_s / (s * s / (R * R * std::pow(n, 3.5) * ln * ln * ln));
}

bool is_psd_kernel(const DiscreteChain& chain, double tol) {
  const Vec root = chain.pi.cwiseSqrt();
  const Eigen::MatrixXd S0 = root.asDiagonal() * chain.P * root.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd S = 0.5 * (S0 + S0.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -tol;
}

// ---------------------------------------------------------------------------

namespace {

double distance(const Vec& a, const Vec& b, Norm norm) {
  return norm == Norm::l2 ? (a - b).norm() : (a - b).lpNorm<Eigen::Infinity>();
}

}  // namespace

IsoperimetryReport isoperimetry_check(const ConvexBody& body, const RegionFn& part1,
                                      const RegionFn& part2, const IsoperimetryOptions& o) {
  if (!(o.delta > 0.0)) throw std::invalid_argument("isoperimetry_check: delta must be > 0");
  if (o.samples < 2) throw std::invalid_argument("isoperimetry_check: need >= 2 samples");
  Rng rng(o.seed);
  const std::vector<Vec> pts = sample_uniform(body, o.samples, rng);
  std::vector<const Vec*> in1, in2;
  std::size_t between = 0;
  for (const auto& x : pts) {
    const bool a = part1(x), b = part2(x);
    if (a && b) throw std::domain_error("isoperimetry_check: regions overlap");
    if (a) {
      in1.push_back(&x);
    } else if (b) {
      in2.push_back(&x);
    } else {
      ++between;
    }
  }
  if (!in1.empty() && !in2.empty()) {
    Rng pair_rng = rng.substream(1);
    for (std::size_t t = 0; t < o.distance_pairs; ++t) {
      const Vec& a = *in1[pair_rng.index(in1.size())];
      const Vec& b = *in2[pair_rng.index(in2.size())];
      if (distance(a, b, o.norm) < o.delta * (1.0 - 1e-12)) {
        throw std::domain_error("isoperimetry_check: regions closer than delta");
      }
    }
  }

  IsoperimetryReport r;
  const double N = static_cast<double>(pts.size());
  r.diameter = diameter(body, o.norm);
  r.between = static_cast<double>(between) / N;
  r.part1 = static_cast<double>(in1.size()) / N;
  r.part2 = static_cast<double>(in2.size()) / N;
  r.between_ci = 1.96 * std::sqrt(r.between * (1.0 - r.between) / N);
  const double small = std::min(r.part1, r.part2);
  if (o.delta >= r.diameter) {
    r.vacuous = true;
    r.pass = small == 0.0;
    r.detail = "delta >= diameter: inequality is vacuous";
    return r;
  }
  const double factor = 2.0 * o.delta / (r.diameter - o.delta);
  r.rhs = factor * small;
  r.rhs_ci = factor * 1.96 * std::sqrt(small * (1.0 - small) / N);
  r.pass = r.between + r.between_ci >= r.rhs - r.rhs_ci;
  std::ostringstream os;
  os << "between " << r.between << " +- " << r.between_ci << " vs " << r.rhs << " +- " << r.rhs_ci;
  r.detail = os.str();
  return r;
}

OverlapReport overlap_check(const ConvexBody& body, const KernelSampler& kernel,
                            const OverlapOptions& o) {
  if (!(o.r > 0.0) || !(o.delta > 0.0)) {
    throw std::invalid_argument("overlap_check: r and delta must be > 0");
  }
  if (o.pairs == 0 || o.samples_per_kernel < 2) {
    throw std::invalid_argument("overlap_check: need pairs and samples");
  }
  const int n = body.dim();
  const Rng root(o.seed);
  Rng pick = root.substream(0);
  const int bins = o.bins_per_axis ? o.bins_per_axis : default_bins_per_axis(o.samples_per_kernel, n);
  const AxisBox bb = bounding_box(body);

  OverlapReport rep;
  std::size_t attempts = 0;
  const std::size_t max_attempts = 1000 * o.pairs;
  while (rep.accepted_pairs < o.pairs) {
    if (++attempts > max_attempts) {
      throw std::runtime_error(rep.accepted_pairs == 0
                                   ? "overlap_check: robust interior appears empty"
                                   : "overlap_check: insufficient accepted pairs");
    }
    const Vec u = sample_uniform(body, 1, pick, {50 * static_cast<std::size_t>(n), 1}).front();
    if (!robust_interior_contains(body, u, o.r)) continue;
    const Vec v = u + o.delta * random_unit_vector(n, pick);
    if (!body.contains(v) || !robust_interior_contains(body, v, o.r)) continue;

    const BinGrid grid = o.local_halfwidth
                             ? BinGrid::centered(0.5 * (u + v), *o.local_halfwidth, bins)
                             : BinGrid(bb.lo, bb.hi, bins);
    Rng ru = root.substream(2 * rep.accepted_pairs + 1);
    Rng rv = root.substream(2 * rep.accepted_pairs + 2);
    std::vector<double> cu(grid.num_cells(), 0.0), cv(grid.num_cells(), 0.0);
    for (std::size_t t = 0; t < o.samples_per_kernel; ++t) {
      cu[grid.cell_of(kernel(u, ru))] += 1.0;
      cv[grid.cell_of(kernel(v, rv))] += 1.0;
    }
    TvEstimate est = tv_counts_two_sample(cu, cv);
    est.bins = bins;
    rep.max_tv = std::max(rep.max_tv, est.value);
    rep.per_pair.push_back(est);
    ++rep.accepted_pairs;
  }
  rep.nu_estimate = 1.0 - rep.max_tv;
  rep.pass = rep.nu_estimate >= o.nu_threshold;
  return rep;
}

double chr_kernel_tv(const ConvexBody& body, const Vec& u, const Vec& v) {
  if (!body.contains(u) || !body.contains(v)) {
    throw std::invalid_argument("chr_kernel_tv: points must lie in the body");
  }
  if (u.size() != v.size()) throw std::invalid_argument("chr_kernel_tv: dimension mismatch");
  int differing = 0;
  for (Eigen::Index i = 0; i < u.size(); ++i) differing += u(i) != v(i);
  if (differing == 0) return 0.0;
  // Differing in one coordinate, the kernels share exactly that axis' chord.
  if (differing == 1) return 1.0 - 1.0 / static_cast<double>(u.size());
  return 1.0;
}

double overlap_conductance_bound(double nu, double delta, double D) {
  if (!(delta > 0.0)) throw std::invalid_argument("overlap_conductance_bound: delta must be > 0");
  if (!(nu > 0.0 && nu < 0.5)) {
    throw std::invalid_argument("overlap_conductance_bound: nu must lie in (0, 1/2)");
  }
  if (!(D >= 2.0 * delta)) throw std::invalid_argument("overlap_conductance_bound: D < 2 delta");
  return nu * delta / (4.0 * (D - delta));
}

OverlapCertificate discrete_overlap_certificate(const DiscreteChain& chain,
                                                const StateSet& kprime, double delta, Norm norm) {
  check_mask(chain, kprime);
  if (!(delta > 0.0)) throw std::invalid_argument("discrete_overlap_certificate: delta must be > 0");
  OverlapCertificate c;
  c.delta = delta;
  c.kprime = kprime;
  c.eps = 1.0 - measure(chain, kprime);
  double worst = 0.0;
  const std::size_t N = chain.size();
  for (std::size_t i = 0; i < N; ++i) {
    if (!kprime[i]) continue;
    for (std::size_t j = i + 1; j < N; ++j) {
      if (!kprime[j] || distance(chain.states[i], chain.states[j], norm) > delta) continue;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      worst = std::max(worst, 0.5 * (chain.P.row(ii) - chain.P.row(jj)).cwiseAbs().sum());
    }
  }
  c.nu = 1.0 - worst;
  return c;
}

FlowBoundReport flow_vs_bound_check(const DiscreteChain& chain, const StateSet& A,
                                    const OverlapCertificate& cert, double diameter) {
  if (!(cert.nu > 0.0)) {
    throw std::invalid_argument("flow_vs_bound_check: overlap property not established (nu <= 0)");
  }
  // Any smaller nu also certifies overlap, so cap it inside the bound's range.
  const double nu = std::min(cert.nu, std::nextafter(0.5, 0.0));
  FlowBoundReport r;
  r.flow = ergodic_flow(chain, A);
  const double q = measure(chain, A);
  const double slack = std::min(q, 1.0 - q) - cert.eps;
  r.bound = slack <= 0.0 ? 0.0 : overlap_conductance_bound(nu, cert.delta, diameter) * slack;
  r.pass = r.flow >= r.bound - 1e-12;
  return r;
}

}  // namespace coordhr
