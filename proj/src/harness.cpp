#include "coordhr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <locale>
#include <map>
#include <sstream>
#include <stdexcept>

#include "coordhr/conductance.hpp"
#include "coordhr/mixture.hpp"
#include "coordhr/numeric.hpp"
#include "coordhr/schemes.hpp"

namespace coordhr {

std::string code_version() { return "coordhr 0.1.0"; }

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os.width(16);
  os.fill('0');
  os << std::hex << v;
  return os.str();
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  return os;
}

Json bounds_to_json(const BoundParams& b) {
  return {{"n", b.n},          {"R", b.R},
          {"M", b.M},          {"eps", b.eps},
          {"s", b.s},          {"sigma", b.sigma},
          {"C_main", b.constants.C_main},
          {"c_cond", b.constants.c_cond},
          {"c_flow", b.constants.c_flow}};
}

BoundParams bounds_from_json(const Json& j) {
  BoundParams b;
  b.n = j.value("n", b.n);
  b.R = j.value("R", b.R);
  b.M = j.value("M", b.M);
  b.eps = j.value("eps", b.eps);
  b.s = j.value("s", b.s);
  b.sigma = j.value("sigma", b.sigma);
  b.constants.C_main = j.value("C_main", b.constants.C_main);
  b.constants.c_cond = j.value("c_cond", b.constants.c_cond);
  b.constants.c_flow = j.value("c_flow", b.constants.c_flow);
  return b;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  if (body_file && !std::filesystem::exists(*body_file)) {
    throw std::invalid_argument("ExperimentConfig.body_file: '" + body_file->string() +
                                "' does not exist");
  }
  if (scheme != "chr" && scheme != "hnr" && scheme != "gaussian" && scheme != "gaussian_iterate") {
    throw std::invalid_argument("ExperimentConfig.scheme: unknown scheme '" + scheme + "'");
  }
  if (!(sigma > 0.0)) throw std::invalid_argument("ExperimentConfig.sigma: must be > 0");
  if (tau < 0) throw std::invalid_argument("ExperimentConfig.tau: must be >= 0");
  if (!(M >= 1.0)) throw std::invalid_argument("ExperimentConfig.M: must be >= 1");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw std::invalid_argument("ExperimentConfig.checkpoints: must be increasing");
  }
  bounds.validate();
}

Json to_json(const ExperimentConfig& c) {
  Json j = c.extra.is_object() ? c.extra : Json::object();
  j["body_file"] = c.body_file ? Json(c.body_file->generic_string()) : Json(nullptr);
  j["scheme"] = c.scheme;
  j["sigma"] = c.sigma;
  j["tau"] = c.tau;
  j["M"] = c.M;
  j["steps"] = c.steps;
  j["chains"] = c.chains;
  j["checkpoints"] = c.checkpoints;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.generic_string();
  j["bounds"] = bounds_to_json(c.bounds);
  return j;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  ExperimentConfig c;
  Json extra = Json::object();
  for (const auto& [key, value] : j.items()) {
    if (key == "body_file") {
      if (!value.is_null()) c.body_file = value.get<std::string>();
    } else if (key == "scheme") {
      c.scheme = value.get<std::string>();
    } else if (key == "sigma") {
      c.sigma = value.get<double>();
    } else if (key == "tau") {
      c.tau = value.get<int>();
    } else if (key == "M") {
      c.M = value.get<double>();
    } else if (key == "steps") {
      c.steps = value.get<std::size_t>();
    } else if (key == "chains") {
      c.chains = value.get<std::size_t>();
    } else if (key == "checkpoints") {
      c.checkpoints = value.get<std::vector<std::size_t>>();
    } else if (key == "seed") {
      c.seed = value.get<std::uint64_t>();
    } else if (key == "output_dir") {
      c.output_dir = value.get<std::string>();
    } else if (key == "bounds") {
      c.bounds = bounds_from_json(value);
    } else {
      extra[key] = value;
    }
  }
  c.extra = std::move(extra);
  return c;
}

std::string config_hash(const ExperimentConfig& config) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical. Where
  // results are written does not change them, so output_dir is left out.
  Json j = to_json(config);
  j.erase("output_dir");
  return hex64(hash_label(j.dump()));
}

// ---------------------------------------------------------------------------
// Manifest and report

Verdict RunManifest::overall() const {
  bool inconclusive = false;
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return Verdict::fail;
    if (c.verdict == Verdict::inconclusive) inconclusive = true;
  }
  return inconclusive ? Verdict::inconclusive : Verdict::pass;
}

int RunManifest::exit_code() const {
  switch (overall()) {
    case Verdict::pass:
      return 0;
    case Verdict::fail:
      return 1;
    case Verdict::inconclusive:
      return 2;
  }
  return 1;
}

Json to_json(const RunManifest& m) {
  Json seeds = Json::array();
  for (const auto& [label, s] : m.seeds) seeds.push_back({{"label", label}, {"seed", s}});
  Json outputs = Json::array();
  for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"hash", o.hash}});
  Json checks = Json::array();
  for (const auto& c : m.checks) {
    checks.push_back({{"name", c.name},
                      {"tag", c.tag},
                      {"measured", c.measured},
                      {"bound", c.bound},
                      {"verdict", to_string(c.verdict)},
                      {"detail", c.detail}});
  }
  return {{"preset", m.preset},
          {"config_hash", m.config_hash},
          {"code_version", m.code_version},
          {"master_seed", m.master_seed},
          {"seeds", seeds},
          {"started", m.started},
          {"finished", m.finished},
          {"elapsed_seconds", m.elapsed_seconds},
          {"outputs", outputs},
          {"checks", checks},
          {"overall", to_string(m.overall())}};
}

void emit_report(const RunManifest& m, std::ostream& out) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(10);
  os << "# preset: " << (m.preset.empty() ? "-" : m.preset) << '\n'
     << "# config: " << m.config_hash << '\n'
     << "# version: " << m.code_version << '\n'
     << "# seed: " << m.master_seed << '\n';
  for (const auto& c : m.checks) {
    os << to_string(c.verdict) << ": " << c.name << " [" << c.tag << "] measured=" << c.measured
       << " bound=" << c.bound;
    if (!c.detail.empty()) os << ' ' << c.detail;
    os << '\n';
  }
  out << os.str();
}

void emit_report(const RunManifest& m, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream report(dir / "report.txt");
  std::ofstream manifest(dir / "manifest.json");
  if (!report || !manifest) throw std::runtime_error("emit_report: cannot write to " + dir.string());
  emit_report(m, report);
  manifest << to_json(m).dump(2) << '\n';
  if (!report || !manifest) throw std::runtime_error("emit_report: write failed in " + dir.string());
}

std::string hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash_file: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return hex64(hash_label(ss.str()));
}

// ---------------------------------------------------------------------------
// Instances

ConvexBody random_sandwiched_polytope(int n, Rng& rng, int facets) {
  if (n < 1) throw std::invalid_argument("random_sandwiched_polytope: n must be >= 1");
  const int m = facets > 0 ? facets : 3 + static_cast<int>(rng.index(6));
  const double R = 1.0 + 2.0 * rng.uniform();
  Eigen::MatrixXd A(m + 2 * n, n);
  Vec b(m + 2 * n);
  for (int i = 0; i < m; ++i) {
    const Vec a = random_unit_vector(n, rng);
    A.row(i) = a.transpose();
    b(i) = a.lpNorm<1>() * (1.0 + rng.uniform());
  }
  for (int j = 0; j < n; ++j) {
    A.row(m + 2 * j).setZero();
    A(m + 2 * j, j) = 1.0;
    A.row(m + 2 * j + 1).setZero();
    A(m + 2 * j + 1, j) = -1.0;
    b(m + 2 * j) = R;
    b(m + 2 * j + 1) = R;
  }
  return ConvexBody::h_polytope(A, b, R);
}

std::uint64_t preset_seed(std::uint64_t master, const std::string& preset,
                          std::uint64_t instance) {
  return derive_seed(master, {hash_label(preset), instance});
}

// ---------------------------------------------------------------------------
// Presets

namespace {

class Context {
 public:
  Context(std::string preset, Json params, std::uint64_t master, RunManifest& manifest)
      : preset_(std::move(preset)), params_(std::move(params)), master_(master), m_(manifest) {}

  template <typename T>
  T get(const char* key) const {
    return params_.at(key).get<T>();
  }
  const Json& params() const { return params_; }

  std::uint64_t seed(std::uint64_t instance, const std::string& label) {
    const std::uint64_t s = preset_seed(master_, preset_, instance);
    m_.seeds.emplace_back(label, s);
    return s;
  }

  void check(std::string name, std::string tag, double measured, double bound, Verdict v,
             std::string detail = {}) {
    m_.checks.push_back({std::move(name), std::move(tag), measured, bound, v, std::move(detail)});
  }
  void check(std::string name, std::string tag, double measured, double bound, bool ok,
             std::string detail = {}) {
    check(std::move(name), std::move(tag), measured, bound, ok ? Verdict::pass : Verdict::fail,
          std::move(detail));
  }

  void file(const std::string& name, const std::string& contents) {
    files_.emplace_back(name, contents);
  }
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::string preset_;
  Json params_;
  std::uint64_t master_;
  RunManifest& m_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> doubles(const Context& c, const char* key) {
  return c.params().at(key).get<std::vector<double>>();
}

void uniformity(Context& c) {
  const int n = c.get<int>("n");
  const auto chains = c.get<std::size_t>("chains");
  const auto steps = c.get<std::size_t>("steps");
  const auto burn_in = c.get<std::size_t>("burn_in");
  const auto thinning = c.get<std::size_t>("thinning");
  const ConvexBody body = ConvexBody::cube(n, c.get<double>("halfwidth"));
  const WarmStart warm(body, c.get<double>("M"));
  const MarkovScheme chr = chr_scheme();

  std::vector<Vec> pooled;
  std::vector<Trajectory> trajectories;
  for (std::size_t k = 0; k < chains; ++k) {
    Rng rng(c.seed(k, "chain " + std::to_string(k)));
    const Vec start = warm.sample(rng);
    Trajectory t = run_chain(chr, body, start, steps, rng, thinning);
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t.step[i] > burn_in) pooled.push_back(t.states[i]);
    }
    trajectories.push_back(std::move(t));
  }
  Rng ref_rng(c.seed(chains, "reference"));
  std::vector<Vec> reference;
  const auto ref_count = c.get<std::size_t>("reference_samples");
  reference.reserve(ref_count);
  for (std::size_t i = 0; i < ref_count; ++i) reference.push_back(exact_uniform_sample(body, ref_rng));

  const AxisBox bb = bounding_box(body);
  const BinGrid grid(bb.lo, bb.hi, c.get<int>("bins"));
  const TvEstimate tv = two_sample_tv(pooled, reference, grid);
  const double ks = max_axis_ks(pooled, reference);
  const double tv_bound = c.get<double>("tv_bound");
  const double ks_bound = c.get<double>("ks_bound");
  const std::string pool = "pooled " + std::to_string(pooled.size()) + " states";
  c.check("binned-tv", "chr-stationarity", tv.value, tv_bound, tv.value <= tv_bound,
          pool + ", ci " + fmt(tv.ci_halfwidth) + ", noise floor " + fmt(tv.noise_floor()));
  c.check("axis-ks", "chr-stationarity", ks, ks_bound, ks <= ks_bound, pool);

  auto traj = csv_stream();
  write_trajectory_csv(traj, trajectories);
  c.file("trajectories.csv", traj.str());
  auto sum = csv_stream();
  sum << "metric,value,ci,bound\n"
      << "binned_tv," << tv.value << ',' << tv.ci_halfwidth << ',' << tv_bound << '\n'
      << "max_axis_ks," << ks << ",," << ks_bound << '\n';
  c.file("uniformity.csv", sum.str());
}

DiscreteChain random_chr_chain(Context& c, std::size_t instance, int cells) {
  Rng rng(c.seed(instance, "polytope " + std::to_string(instance)));
  return discretize_chr(random_sandwiched_polytope(2, rng), cells);
}

void reversibility(Context& c) {
  const auto count = c.get<std::size_t>("polytopes");
  const int cells = c.get<int>("cells");
  const double db_tol = c.get<double>("balance_tolerance");
  const double st_tol = c.get<double>("stationarity_tolerance");
  double worst_db = 0.0, worst_st = 0.0, worst_row = 0.0;
  auto csv = csv_stream();
  csv << "instance,states,detailed_balance,stationarity,row_sum\n";
  for (std::size_t i = 0; i < count; ++i) {
    const DiscreteChain chain = random_chr_chain(c, i, cells);
    const double db = max_detailed_balance_violation(chain);
    const double st = stationarity_residual(chain);
    const double row = max_row_sum_error(chain);
    worst_db = std::max(worst_db, db);
    worst_st = std::max(worst_st, st);
    worst_row = std::max(worst_row, row);
    csv << i << ',' << chain.size() << ',' << db << ',' << st << ',' << row << '\n';
  }
  c.file("reversibility.csv", csv.str());
  c.check("detailed-balance", "chr-reversibility", worst_db, db_tol, worst_db <= db_tol,
          std::to_string(count) + " chains");
  c.check("stationarity", "chr-reversibility", worst_st, st_tol, worst_st <= st_tol,
          std::to_string(count) + " chains");
  c.check("row-sums", "chr-reversibility", worst_row, st_tol, worst_row <= st_tol);
}

StateSet random_subset(std::size_t size, Rng& rng) {
  const double p = rng.uniform(0.05, 0.95);
  StateSet A(size);
  for (std::size_t i = 0; i < size; ++i) A[i] = rng.uniform() < p;
  return A;
}

void flow_symmetry(Context& c) {
  const auto chains = c.get<std::size_t>("chains");
  const auto subsets = c.get<std::size_t>("subsets");
  const int cells = c.get<int>("cells");
  const double tol = c.get<double>("tolerance");
  double worst = 0.0;
  auto csv = csv_stream();
  csv << "chain,subset,flow_out,flow_in,discrepancy\n";
  for (std::size_t k = 0; k < chains; ++k) {
    Rng rng(c.seed(k, "chain " + std::to_string(k)));
    const ConvexBody body = random_sandwiched_polytope(2, rng);
    const DiscreteChain chain = k % 2 == 0 ? discretize_chr(body, cells)
                                           : discretize_gaussian(body, cells, 0.5);
    for (std::size_t s = 0; s < subsets; ++s) {
      const StateSet A = random_subset(chain.size(), rng);
      const StateSet B = complement(A);
      const double out = ergodic_flow(chain, A, B);
      const double in = ergodic_flow(chain, B, A);
      worst = std::max(worst, std::abs(out - in));
      csv << k << ',' << s << ',' << out << ',' << in << ',' << std::abs(out - in) << '\n';
    }
  }
  c.file("flow_symmetry.csv", csv.str());
  c.check("flow-symmetry", "symmetry-of-flow", worst, tol, worst <= tol,
          std::to_string(chains * subsets) + " cuts");
}

void pinsker(Context& c) {
  const auto instances = c.get<std::size_t>("instances");
  Rng rng(c.seed(0, "instances"));
  std::size_t violations = 0;
  double worst_margin = -1.0;
  auto csv = csv_stream();
  csv << "instance,n,tau,sigma,distance,exact_tv,bound\n";
  for (std::size_t i = 0; i < instances; ++i) {
    const int n = 2 + static_cast<int>(rng.index(5));
    const int tau = n + static_cast<int>(rng.index(60));
    const double sigma = std::pow(10.0, rng.uniform(-4.0, -1.0));
    const MultiIndex I = sample_full_rank_multi_index(n, tau, rng);
    Vec v(n);
    for (int j = 0; j < n; ++j) v(j) = rng.uniform(-1.0, 1.0);
    const Vec u = v + rng.uniform(0.0, 4.0) * sigma * random_unit_vector(n, rng);
    const double tv = gaussian_tv_equal_cov(v, u, I, sigma);
    const double bound = std::min(1.0, pinsker_bound(v, u, sigma));
    if (tv > bound + 1e-15) ++violations;
    worst_margin = std::max(worst_margin, tv - bound);
    csv << i << ',' << n << ',' << tau << ',' << sigma << ',' << (v - u).norm() << ',' << tv
        << ',' << bound << '\n';
  }
  c.file("pinsker.csv", csv.str());
  c.check("pinsker-domination", "component-tv-vs-pinsker", static_cast<double>(violations), 0.0,
          violations == 0,
          std::to_string(instances) + " instances, max(tv - bound) = " + fmt(worst_margin));
}

CouplingOptions coupling_options(Context& c, const std::string& label) {
  CouplingOptions o;
  o.n = c.get<int>("n");
  o.sigma = c.get<double>("sigma");
  o.halfwidth = c.get<double>("halfwidth");
  o.samples = c.get<std::size_t>("samples");
  o.tau = c.get<int>("tau");
  o.bins_per_axis = c.get<int>("bins_per_axis");
  o.seed = c.seed(0, label);
  return o;
}

void coupling(Context& c) {
  CouplingOptions o = coupling_options(c, "iterate and mixture");
  o.multiplier = c.get<double>("multiplier");
  const CouplingReport r = coupling_check(o);
  c.check("rejection-frequency", "gaussian-iterate-rejection", r.rejection_frequency,
          r.rejection_bound, r.rejection_verdict,
          "std error " + fmt(r.rejection_std_error) + ", tau " + std::to_string(r.tau));
  c.check("iterate-vs-mixture-tv", "mixture-approximation", r.tv.value, r.bound, r.verdict,
          r.detail);
  auto csv = csv_stream();
  csv << "metric,value,ci,noise_floor,bound\n"
      << "rejection_frequency," << r.rejection_frequency << ',' << 3.0 * r.rejection_std_error
      << ",," << r.rejection_bound << '\n'
      << "mixture_tv," << r.tv.value << ',' << r.tv.ci_halfwidth << ',' << r.tv.noise_floor() << ','
      << r.bound << '\n';
  c.file("coupling.csv", csv.str());
}

void two_start(Context& c) {
  const CouplingOptions o = coupling_options(c, "two starts");
  const double angle = c.get<double>("angle");
  Vec offset(o.n);
  offset.setZero();
  offset(0) = std::cos(angle);
  offset(1) = std::sin(angle);
  offset *= o.sigma * c.get<double>("offset_fraction");
  const TwoStartReport r = two_start_check(o, offset, c.get<int>("aggregate_tau"));
  std::string detail;
  const Verdict tv_verdict = r.tv.value <= r.bound + 2.0 * r.tv.ci_halfwidth ? Verdict::pass
                                                                              : Verdict::fail;
  c.check("two-start-tv", "close-starts-overlap", r.tv.value, r.bound, tv_verdict,
          "ci " + fmt(r.tv.ci_halfwidth) + ", tau " + std::to_string(r.tau));
  c.check("component-sum-tv", "close-starts-overlap", r.aggregated_tv, 0.5,
          r.aggregated_tv <= 0.5, "exact enumeration at tau " + std::to_string(r.aggregate_tau));
  auto csv = csv_stream();
  csv << "metric,value,ci,bound\n"
      << "two_start_tv," << r.tv.value << ',' << r.tv.ci_halfwidth << ',' << r.bound << '\n'
      << "component_sum_tv," << r.aggregated_tv << ",0,0.5\n";
  c.file("two_start.csv", csv.str());
}

void isoperimetry(Context& c) {
  const auto instances = c.get<std::size_t>("instances");
  const auto samples = c.get<std::size_t>("samples");
  const double dlo = c.get<double>("delta_min");
  const double dhi = c.get<double>("delta_max");
  std::size_t failures = 0;
  auto csv = csv_stream();
  csv << "instance,body,delta,between,between_ci,rhs,rhs_ci,pass\n";
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(c.seed(i, "instance " + std::to_string(i)));
    ConvexBody body = ConvexBody::cube(2);
    switch (i % 4) {
      case 0: {
        Vec center(2), half(2);
        for (int j = 0; j < 2; ++j) {
          center(j) = rng.uniform(-0.5, 0.5);
          half(j) = 1.0 + std::abs(center(j)) + rng.uniform(0.0, 1.0);
        }
        body = ConvexBody::box(center, half, (center.cwiseAbs() + half).maxCoeff());
        break;
      }
      case 1: {
        const double r = std::sqrt(2.0) + rng.uniform(0.0, 1.0);
        body = ConvexBody::euclidean_ball(Vec::Zero(2), r, r);
        break;
      }
      case 2: {
        const double a = 1.0 + rng.uniform(0.0, 0.5);
        const double scale = 2.0 + 2.0 * a + rng.uniform(0.0, 1.0);
        body = ConvexBody::simplex(Vec::Constant(2, -a), scale, scale - a);
        break;
      }
      default:
        body = random_sandwiched_polytope(2, rng);
    }
    const double delta = rng.uniform(dlo, dhi);
    const Vec dir = random_unit_vector(2, rng);
    const std::vector<Vec> probe = sample_uniform(body, 1, rng);
    const double cut = dir.dot(probe.front());
    IsoperimetryOptions o;
    o.delta = delta;
    o.samples = samples;
    o.seed = rng.next_u64();
    const IsoperimetryReport r = isoperimetry_check(
        body, [&](const Vec& x) { return dir.dot(x) <= cut - delta / 2; },
        [&](const Vec& x) { return dir.dot(x) >= cut + delta / 2; }, o);
    if (!r.pass) ++failures;
    csv << i << ',' << to_string(body.kind()) << ',' << delta << ',' << r.between << ','
        << r.between_ci << ',' << r.rhs << ',' << r.rhs_ci << ',' << (r.pass ? 1 : 0) << '\n';
  }

  // [-1,1]^2 split at x_1 = +-0.1: the strip has mass exactly 0.1.
  const double delta = 0.2;
  IsoperimetryOptions o;
  o.delta = delta;
  o.samples = c.get<std::size_t>("box_samples");
  o.seed = c.seed(instances, "box instance");
  const IsoperimetryReport box = isoperimetry_check(
      ConvexBody::cube(2), [](const Vec& x) { return x(0) <= -0.1; },
      [](const Vec& x) { return x(0) >= 0.1; }, o);
  const double between_exact = 0.1;
  const double rhs_exact = 2.0 * delta / (2.0 * std::sqrt(2.0) - delta) * 0.45;
  const bool box_ok = std::abs(box.between - between_exact) <= 3.0 * box.between_ci &&
                      std::abs(box.rhs - rhs_exact) <= 3.0 * box.rhs_ci && box.pass;
  csv << "box,box," << delta << ',' << box.between << ',' << box.between_ci << ',' << box.rhs
      << ',' << box.rhs_ci << ',' << (box_ok ? 1 : 0) << '\n';
  c.file("isoperimetry.csv", csv.str());

  c.check("isoperimetry-random", "isoperimetric-inequality", static_cast<double>(failures), 0.0,
          failures == 0, std::to_string(instances) + " slab instances");
  c.check("isoperimetry-box", "isoperimetric-inequality", box.between, between_exact, box_ok,
          "rhs " + fmt(box.rhs) + " vs " + fmt(rhs_exact) + " (ci " + fmt(box.rhs_ci) + ")");
}

void robust_interior(Context& c) {
  const auto count = c.get<std::size_t>("polytopes");
  const auto samples = c.get<std::size_t>("samples");
  const auto points = c.get<std::size_t>("scaled_points");
  const std::vector<double> eps_list = doubles(c, "eps");
  std::size_t volume_failures = 0, point_failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  auto csv = csv_stream();
  csv << "instance,eps,ratio,ci,bound,scaled_failures\n";
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(c.seed(i, "polytope " + std::to_string(i)));
    const ConvexBody body = random_sandwiched_polytope(2, rng);
    for (double eps : eps_list) {
      const RobustVolumeReport r = check_robust_interior_volume(body, eps, samples, rng.next_u64());
      const double margin = r.ratio_estimate + 3.0 * r.ci_halfwidth - r.bound;
      worst = std::min(worst, margin);
      if (margin < 0.0) ++volume_failures;
      std::size_t bad = 0;
      for (const Vec& x : sample_uniform(body, points, rng)) {
        if (!robust_interior_contains(body, (1.0 - eps) * x, eps)) ++bad;
      }
      point_failures += bad;
      csv << i << ',' << eps << ',' << r.ratio_estimate << ',' << r.ci_halfwidth << ',' << r.bound
          << ',' << bad << '\n';
    }
  }
  c.file("robust_interior.csv", csv.str());
  c.check("robust-interior-volume", "scaled-body-in-robust-interior",
          static_cast<double>(volume_failures), 0.0, volume_failures == 0,
          "min(ratio + 3 ci - bound) = " + fmt(worst));
  c.check("scaled-points", "scaled-body-in-robust-interior", static_cast<double>(point_failures),
          0.0, point_failures == 0);
}

void s_conductance_preset(Context& c) {
  const auto chains = c.get<std::size_t>("chains");
  const int cells = c.get<int>("cells");
  const std::vector<double> s_list = doubles(c, "s");
  const auto cuts = c.get<std::size_t>("cuts");
  std::size_t order_failures = 0, flow_failures = 0, flow_checked = 0;
  auto csv = csv_stream();
  csv << "chain,states,s,exact,sweep,asymptotic_ratio\n";
  for (std::size_t k = 0; k < chains; ++k) {
    Rng rng(c.seed(k, "chain " + std::to_string(k)));
    const ConvexBody body = k == 0 ? ConvexBody::cube(2) : random_sandwiched_polytope(2, rng);
    const DiscreteChain chain = discretize_chr(body, cells);
    for (double s : s_list) {
      const double exact = s_conductance(chain, s).value;
      ConductanceOptions sweep;
      sweep.mode = ConductanceMode::sweep;
      sweep.seed = rng.next_u64();
      const double upper = s_conductance(chain, s, sweep).value;
      if (upper < exact - 1e-12) ++order_failures;
      csv << k << ',' << chain.size() << ',' << s << ',' << exact << ',' << upper << ','
          << asymptotic_conductance_ratio(exact, s, body.declared_R(), 2) << '\n';
    }

    // Overlap certificate over all states at one grid spacing, then the flow
    // floor it implies on random cuts.
    const AxisBox bb = bounding_box(body);
    const double spacing = (bb.hi - bb.lo).maxCoeff() / cells;
    const StateSet all(chain.size(), true);
    const OverlapCertificate cert = discrete_overlap_certificate(chain, all, spacing, Norm::linf);
    const double D = diameter(body, Norm::linf);
    if (cert.nu <= 0.0 || D < 2.0 * cert.delta) continue;
    for (std::size_t t = 0; t < cuts; ++t) {
      const FlowBoundReport f = flow_vs_bound_check(chain, random_subset(chain.size(), rng), cert, D);
      ++flow_checked;
      if (!f.pass) ++flow_failures;
    }
  }
  c.file("s_conductance.csv", csv.str());
  c.check("sweep-above-exact", "s-conductance", static_cast<double>(order_failures), 0.0,
          order_failures == 0, "sweep minimum is an upper bound on the exact infimum");
  c.check("overlap-flow-floor", "overlap-implies-conductance", static_cast<double>(flow_failures),
          0.0, flow_failures == 0, std::to_string(flow_checked) + " cuts");
}

Vec row_times(const Vec& mu, const Eigen::MatrixXd& P) { return (mu.transpose() * P).transpose(); }

void ls_mixing(Context& c) {
  const auto chains = c.get<std::size_t>("chains");
  const int cells = c.get<int>("cells");
  const int k_max = c.get<int>("k_max");
  const std::vector<double> s_list = doubles(c, "s");
  std::size_t violations = 0, evaluated = 0, non_psd = 0;
  double worst = -1.0;
  auto csv = csv_stream();
  csv << "chain,start,s,h_s,phi_s,k,tv,bound\n";
  for (std::size_t k = 0; k < chains; ++k) {
    Rng rng(c.seed(k, "chain " + std::to_string(k)));
    const ConvexBody body = k == 0 ? ConvexBody::cube(2) : random_sandwiched_polytope(2, rng);
    const DiscreteChain chain = discretize_chr(body, cells);
    if (!is_psd_kernel(chain)) ++non_psd;
    const std::size_t N = chain.size();
    Vec random_start(N);
    for (std::size_t i = 0; i < N; ++i) random_start(i) = std::pow(rng.uniform(), 3.0);
    random_start /= random_start.sum();
    Vec point_mass = Vec::Zero(N);
    point_mass(rng.index(N)) = 1.0;
    const std::pair<const char*, Vec> starts[] = {{"random", random_start}, {"point", point_mass}};
    for (double s : s_list) {
      ConductanceOptions split;
      split.split_atoms = true;
      const double phi = s_conductance(chain, s, split).value;
      for (const auto& [label, mu0] : starts) {
        const double H = h_s(chain, mu0, s, true);
        Vec mu = mu0;
        for (int step = 0; step <= k_max; ++step) {
          const double tv = tv_distance(mu, chain.pi);
          const double bound = ls_mixing_estimate(H, std::min(phi, 1.0), s, step);
          ++evaluated;
          if (tv > bound + 1e-12) ++violations;
          worst = std::max(worst, tv - bound);
          if (step % 20 == 0) {
            csv << k << ',' << label << ',' << s << ',' << H << ',' << phi << ',' << step << ','
                << tv << ',' << bound << '\n';
          }
          mu = row_times(mu, chain.P);
        }
      }
    }
  }
  c.file("ls_mixing.csv", csv.str());
  c.check("ls-estimate-dominates-tv", "lovasz-simonovits", static_cast<double>(violations), 0.0,
          violations == 0,
          std::to_string(evaluated) + " (chain, start, s, k) cases, max(tv - bound) = " +
              fmt(worst));
  c.check("psd-kernels", "lovasz-simonovits", static_cast<double>(non_psd), 0.0, non_psd == 0,
          "atom splitting is exact for PSD kernels");
}

void multi_step_flow(Context& c) {
  const auto chains = c.get<std::size_t>("chains");
  const auto cuts = c.get<std::size_t>("cuts");
  const int cells = c.get<int>("cells");
  const int tau_max = c.get<int>("tau_max");
  std::size_t violations = 0, evaluated = 0;
  double worst = -1.0;
  auto csv = csv_stream();
  csv << "chain,cut,tau,flow_one_step,flow_tau_step\n";
  for (std::size_t k = 0; k < chains; ++k) {
    Rng rng(c.seed(k, "chain " + std::to_string(k)));
    const ConvexBody body = random_sandwiched_polytope(2, rng);
    const DiscreteChain chain = discretize_gaussian(body, cells, rng.uniform(0.2, 1.0));
    std::vector<DiscreteChain> powers;
    for (int tau = 2; tau <= tau_max; ++tau) powers.push_back(chain.with_kernel(chain_power(chain.P, tau)));
    for (std::size_t t = 0; t < cuts; ++t) {
      const StateSet A = random_subset(chain.size(), rng);
      const double one = ergodic_flow(chain, A);
      for (int tau = 2; tau <= tau_max; ++tau) {
        const double many = ergodic_flow(powers[tau - 2], A);
        const double gap = multi_step_flow_comparison(tau) * many - one;
        ++evaluated;
        worst = std::max(worst, gap);
        if (gap > 1e-14) ++violations;
        csv << k << ',' << t << ',' << tau << ',' << one << ',' << many << '\n';
      }
    }
  }
  c.file("multi_step_flow.csv", csv.str());
  c.check("multi-step-flow", "multi-step-flow", static_cast<double>(violations), 0.0,
          violations == 0,
          std::to_string(evaluated) + " (cut, tau) cases, max(flow_tau / tau - flow) = " +
              fmt(worst));
}

void scaling(Context& c) {
  const auto dims = c.params().at("dims").get<std::vector<int>>();
  const double M = c.get<double>("M");
  const double eps = c.get<double>("eps");
  const auto chains = c.get<std::size_t>("chains");
  const auto last = c.get<std::size_t>("max_checkpoint");
  std::vector<std::size_t> checkpoints;
  for (std::size_t t = 1; t <= last; ++t) checkpoints.push_back(t);
  MixingOptions mo;
  mo.method = TvMethod::gauge;
  mo.bins = c.get<int>("bins");

  auto csv = csv_stream();
  csv << "n,checkpoint,tv_estimate,ci,pass\n";
  std::vector<MixingReport> reports;
  for (int n : dims) {
    BoundParams bp;
    bp.n = n;
    bp.M = M;
    bp.eps = eps;
    bp.validate();
    const MixingReport r = mixing_time_empirical(chr_scheme(), ConvexBody::cube(n), M, eps,
                                                 checkpoints, chains,
                                                 c.seed(n, "dimension " + std::to_string(n)), mo);
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
      const auto& e = r.estimates[i];
      csv << n << ',' << r.checkpoints[i] << ',' << e.value << ',' << e.ci_halfwidth << ','
          << (e.value + e.ci_halfwidth < eps ? 1 : 0) << '\n';
    }
    const double bound = theorem_main_bound(n, 1.0, M, eps);
    if (!r.reached()) {
      c.check("mixing-n" + std::to_string(n), "main-mixing-theorem", NAN, bound,
              Verdict::inconclusive, "no checkpoint reached tv + ci < eps");
    } else {
      const double T = static_cast<double>(*r.first_below);
      c.check("mixing-n" + std::to_string(n), "main-mixing-theorem", T, bound, T <= bound);
    }
    reports.push_back(r);
  }
  c.file("scaling.csv", csv.str());

  // Checkpoint T(n) may only drop below T(n-1) if the (n-1)-run was already
  // within eps at T(n) up to its confidence interval.
  std::size_t violations = 0;
  std::string detail;
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (!reports[i].reached() || !reports[i - 1].reached()) continue;
    const std::size_t t_now = *reports[i].first_below;
    const std::size_t t_prev = *reports[i - 1].first_below;
    if (t_now < t_prev) {
      const auto& prev = reports[i - 1];
      const auto at = std::find(prev.checkpoints.begin(), prev.checkpoints.end(), t_now);
      const TvEstimate& e = prev.estimates[static_cast<std::size_t>(at - prev.checkpoints.begin())];
      if (e.value - e.ci_halfwidth > eps) {
        ++violations;
        detail += " n=" + std::to_string(dims[i]);
      }
    }
  }
  c.check("monotone-in-n", "main-mixing-theorem", static_cast<double>(violations), 0.0,
          violations == 0, "checkpoints non-decreasing within CI" + detail);
}

void bounds_preset(Context& c) {
  BoundParams p;
  p.n = c.get<int>("n");
  p.R = c.get<double>("R");
  p.M = c.get<double>("M");
  p.eps = c.get<double>("eps");
  p.s = c.get<double>("s");
  p.sigma = c.get<double>("sigma");
  p.constants.C_main = c.get<double>("C_main");
  p.constants.c_cond = c.get<double>("c_cond");
  p.constants.c_flow = c.get<double>("c_flow");
  p.validate();
  auto csv = csv_stream();
  csv << "name,tag,value,note\n";
  for (const BoundRow& row : bounds_table(p)) {
    csv << row.name << ',' << row.tag << ',' << row.value << ',' << row.note << '\n';
    const bool finite = std::isfinite(row.value);
    c.check(row.name, row.tag, row.value, row.value,
            finite ? Verdict::pass : Verdict::inconclusive, row.note);
  }
  c.file("bounds.csv", csv.str());
}

struct Preset {
  std::function<void(Context&)> run;
  Json defaults;
};

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table = {
      {"uniformity",
       {uniformity,
        {{"n", 3}, {"halfwidth", 1.0}, {"M", 4.0}, {"chains", 64}, {"steps", 5000},
         {"burn_in", 500}, {"thinning", 10}, {"reference_samples", 100000}, {"bins", 4},
         {"tv_bound", 0.05}, {"ks_bound", 0.02}}}},
      {"reversibility",
       {reversibility,
        {{"polytopes", 20}, {"cells", 8}, {"balance_tolerance", 1e-12},
         {"stationarity_tolerance", 1e-10}}}},
      {"flow-symmetry",
       {flow_symmetry, {{"chains", 10}, {"subsets", 100}, {"cells", 8}, {"tolerance", 1e-10}}}},
      {"pinsker", {pinsker, {{"instances", 1000}}}},
      {"coupling",
       {coupling,
        {{"n", 2}, {"sigma", 1e-3}, {"halfwidth", 1.0}, {"samples", 1000000}, {"tau", 0},
         {"bins_per_axis", 0}, {"multiplier", 1.0}}}},
      {"two-start",
       {two_start,
        {{"n", 2}, {"sigma", 1e-3}, {"halfwidth", 1.0}, {"samples", 1000000}, {"tau", 0},
         {"bins_per_axis", 0}, {"angle", 0.3}, {"offset_fraction", 1.0},
         {"aggregate_tau", 6}}}},
      {"isoperimetry",
       {isoperimetry,
        {{"instances", 50}, {"samples", 20000}, {"delta_min", 0.05}, {"delta_max", 0.5},
         {"box_samples", 200000}}}},
      {"robust-interior",
       {robust_interior,
        {{"polytopes", 20}, {"eps", {0.1, 0.3}}, {"samples", 20000}, {"scaled_points", 1000}}}},
      {"s-conductance",
       {s_conductance_preset, {{"chains", 6}, {"cells", 4}, {"s", {0.05, 0.1, 0.25}}, {"cuts", 20}}}},
      {"ls-mixing",
       {ls_mixing, {{"chains", 10}, {"cells", 4}, {"s", {0.05, 0.1}}, {"k_max", 200}}}},
      {"multi-step-flow",
       {multi_step_flow, {{"chains", 10}, {"cuts", 5}, {"cells", 4}, {"tau_max", 5}}}},
      {"scaling",
       {scaling,
        {{"dims", {2, 3, 4, 5, 6}}, {"M", 4.0}, {"eps", 0.25}, {"chains", 10000},
         {"max_checkpoint", 40}, {"bins", 32}}}},
      {"bounds-table",
       {bounds_preset,
        {{"n", 2}, {"R", 1.0}, {"M", 1.0}, {"eps", 0.25}, {"s", 0.25}, {"sigma", 1e-3},
         {"C_main", 1.0}, {"c_cond", 1.0}, {"c_flow", 1.0}}}},
  };
  return table;
}

std::string canonical_preset(const std::string& name) {
  if (name == "lemma11") return "coupling";
  if (name == "lemma12") return "two-start";
  return name;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, p] : presets()) out.push_back(name);
    out.push_back("lemma11");
    out.push_back("lemma12");
    return out;
  }();
  return names;
}

RunManifest run_preset(const std::string& name, const Json& overrides, std::uint64_t seed,
                       const std::filesystem::path& out_dir) {
  const std::string canonical = canonical_preset(name);
  const auto it = presets().find(canonical);
  if (it == presets().end()) throw std::invalid_argument("run_preset: unknown preset '" + name + "'");
  Json params = it->second.defaults;
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw std::invalid_argument("run_preset: overrides must be an object");
    for (const auto& [key, value] : overrides.items()) {
      if (!params.contains(key)) {
        throw std::invalid_argument("run_preset: preset '" + canonical + "' has no parameter '" +
                                    key + "'");
      }
      params[key] = value;
    }
  }

  ExperimentConfig config;
  config.seed = seed;
  config.output_dir = out_dir;
  config.extra = {{"preset", canonical}, {"params", params}};

  RunManifest m;
  m.preset = canonical;
  m.config_hash = config_hash(config);
  m.code_version = code_version();
  m.master_seed = seed;
  m.started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  Context ctx(canonical, params, seed, m);
  try {
    it->second.run(ctx);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("run_preset: bad parameter type: " + std::string(e.what()));
  }

  m.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  m.finished = utc_now();
  for (const auto& [file, contents] : ctx.files()) {
    m.outputs.push_back({file, hex64(hash_label(contents))});
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const auto& [file, contents] : ctx.files()) {
      std::ofstream out(out_dir / file, std::ios::binary);
      out << contents;
      if (!out) throw std::runtime_error("run_preset: cannot write " + (out_dir / file).string());
    }
    emit_report(m, out_dir);
  }
  return m;
}

}  // namespace coordhr
