// Command-line front end: sampling, mixing diagnostics, conductance of
// discretized chains, bound calculators and the verification presets.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coordhr/body_spec.hpp"
#include "coordhr/bounds.hpp"
#include "coordhr/conductance.hpp"
#include "coordhr/diagnostics.hpp"
#include "coordhr/harness.hpp"
#include "coordhr/schemes.hpp"

namespace {

using namespace coordhr;

ConvexBody load_body(const std::string& path) {
  LoadedBody loaded = load_body_spec(path);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << '\n';
  return loaded.body;
}

MarkovScheme make_scheme(const std::string& name, double sigma, int tau, int n) {
  if (name == "chr") return chr_scheme();
  if (name == "hnr") return hnr_scheme();
  if (name == "gaussian") return gaussian_scheme(sigma);
  if (name == "gaussian_iterate") {
    return gaussian_iterate_scheme({sigma, tau > 0 ? tau : default_tau(n)});
  }
  throw std::invalid_argument("unknown scheme '" + name + "'");
}

// Writes to `path`, or to stdout when it is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  write(out);
}

Json parse_overrides(const std::vector<std::string>& assignments) {
  Json j = Json::object();
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + a + "'");
    const std::string key = a.substr(0, eq);
    const std::string value = a.substr(eq + 1);
    try {
      j[key] = Json::parse(value);
    } catch (const Json::parse_error&) {
      j[key] = value;
    }
  }
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coordinate hit-and-run sampling and verification harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  // sample
  auto* sample = app.add_subcommand("sample", "Run independent chains and write their states as CSV");
  std::string body_path, scheme = "chr", out_path;
  double sigma = 1e-3, M = 1.0;
  int tau = 0;
  std::size_t steps = 1000, chains = 1, thinning = 1;
  std::uint64_t seed = 0;
  sample->add_option("--body", body_path, "Body spec file")->required()->check(CLI::ExistingFile);
  sample->add_option("--scheme", scheme, "chr, hnr, gaussian or gaussian_iterate")
      ->check(CLI::IsMember({"chr", "hnr", "gaussian", "gaussian_iterate"}));
  sample->add_option("--sigma", sigma, "Gaussian step size");
  sample->add_option("--tau", tau, "Steps per gaussian_iterate transition (0: ceil(20 n ln n))");
  sample->add_option("--M", M, "Warmness of the start (1: start at the origin)");
  sample->add_option("--steps", steps, "Transitions per chain");
  sample->add_option("--chains", chains, "Number of chains");
  sample->add_option("--thinning", thinning, "Record every k-th state");
  sample->add_option("--seed", seed, "Master seed")->required();
  sample->add_option("--out", out_path, "Output CSV (default stdout)");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Empirical mixing time from a warm start");
  std::string method = "gauge";
  double eps = 0.25, diag_M = 4.0;
  std::size_t diag_chains = 1000, max_checkpoint = 50;
  std::vector<std::size_t> checkpoints;
  int bins = 0;
  std::string diag_body, diag_scheme = "chr", diag_out;
  double diag_sigma = 1e-3;
  diagnose->add_option("--body", diag_body, "Body spec file")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--scheme", diag_scheme, "Walk")
      ->check(CLI::IsMember({"chr", "hnr", "gaussian", "gaussian_iterate"}));
  diagnose->add_option("--sigma", diag_sigma, "Gaussian step size");
  diagnose->add_option("--M", diag_M, "Warmness of the start");
  diagnose->add_option("--eps", eps, "TV target");
  diagnose->add_option("--chains", diag_chains, "Number of chains");
  diagnose->add_option("--checkpoints", checkpoints, "Explicit checkpoints")->delimiter(',');
  diagnose->add_option("--max-checkpoint", max_checkpoint, "Checkpoints 1..k when none are given");
  diagnose->add_option("--method", method, "binned, gauge or ks")
      ->check(CLI::IsMember({"binned", "gauge", "ks"}));
  diagnose->add_option("--bins", bins, "Bins per axis (binned) or in total (gauge)");
  diagnose->add_option("--seed", seed, "Master seed")->required();
  diagnose->add_option("--out", diag_out, "Output CSV (default stdout)");

  // conductance
  auto* conductance = app.add_subcommand("conductance", "s-conductance of a discretized walk");
  std::string cond_body, cond_walk = "chr", mode = "exact";
  int cells = 4;
  double s = 0.1, cond_sigma = 0.5;
  bool split = false;
  std::optional<std::uint64_t> cond_seed;
  conductance->add_option("--body", cond_body, "Body spec file")->required()->check(CLI::ExistingFile);
  conductance->add_option("--walk", cond_walk, "chr or gaussian")
      ->check(CLI::IsMember({"chr", "gaussian"}));
  conductance->add_option("--cells", cells, "Cells per axis");
  conductance->add_option("--sigma", cond_sigma, "Gaussian step size for --walk gaussian");
  conductance->add_option("--s", s, "Excluded measure s");
  conductance->add_option("--mode", mode, "exact or sweep")->check(CLI::IsMember({"exact", "sweep"}));
  conductance->add_flag("--split-atoms", split, "Allow one fractionally included state");
  conductance->add_option("--seed", cond_seed, "Seed (required for sweep mode)");

  // bound
  auto* bound = app.add_subcommand("bound", "Evaluate the bound calculators");
  BoundParams bp;
  std::string bound_out;
  bound->add_option("--n", bp.n, "Dimension");
  bound->add_option("--R", bp.R, "Outer sandwich radius");
  bound->add_option("--M", bp.M, "Warmness");
  bound->add_option("--eps", bp.eps, "TV target");
  bound->add_option("--s", bp.s, "Excluded measure");
  bound->add_option("--sigma", bp.sigma, "Gaussian step size");
  bound->add_option("--C-main", bp.constants.C_main, "Constant of the mixing bound");
  bound->add_option("--c-cond", bp.constants.c_cond, "Constant of the conductance floor");
  bound->add_option("--c-flow", bp.constants.c_flow, "Constant of the Gaussian flow floor");
  bound->add_option("--out", bound_out, "Output CSV (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification preset");
  std::string preset, verify_out;
  std::vector<std::string> sets;
  verify->add_option("preset", preset, "Preset name")->required()->check(CLI::IsMember(preset_names()));
  verify->add_option("--seed", seed, "Master seed")->required();
  verify->add_option("--set", sets, "Parameter override key=value (value parsed as JSON)");
  verify->add_option("--out", verify_out, "Directory for CSVs, report.txt and manifest.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; usage errors share the error code.
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (*sample) {
      const ConvexBody body = load_body(body_path);
      const MarkovScheme walk = make_scheme(scheme, sigma, tau, body.dim());
      std::vector<Trajectory> runs;
      for (std::size_t c = 0; c < chains; ++c) {
        Rng rng = Rng(seed).substream(c);
        const Vec start = M > 1.0 ? warm_start_sample(body, M, rng) : Vec::Zero(body.dim());
        runs.push_back(run_chain(walk, body, start, steps, rng, thinning));
      }
      with_output(out_path, [&](std::ostream& out) { write_trajectory_csv(out, runs); });
      return 0;
    }
    if (*diagnose) {
      const ConvexBody body = load_body(diag_body);
      const MarkovScheme walk = make_scheme(diag_scheme, diag_sigma, 0, body.dim());
      if (checkpoints.empty()) {
        for (std::size_t t = 1; t <= max_checkpoint; ++t) checkpoints.push_back(t);
      }
      MixingOptions mo;
      mo.method = method == "binned" ? TvMethod::binned
                  : method == "gauge" ? TvMethod::gauge
                                      : TvMethod::marginal_ks_proxy;
      mo.bins = bins;
      mo.reference.seed = derive_seed(seed, {hash_label("reference")});
      const MixingReport r =
          mixing_time_empirical(walk, body, diag_M, eps, checkpoints, diag_chains, seed, mo);
      with_output(diag_out, [&](std::ostream& out) { write_mixing_csv(out, r); });
      if (r.reached()) {
        std::cerr << "tv + ci < " << eps << " first at step " << *r.first_below << '\n';
        return 0;
      }
      std::cerr << "tv + ci stayed above " << eps << " at every checkpoint\n";
      return 2;
    }
    if (*conductance) {
      if (mode == "sweep" && !cond_seed) throw CLI::RequiredError("--seed (sweep mode)");
      const ConvexBody body = load_body(cond_body);
      const DiscreteChain chain = cond_walk == "chr" ? discretize_chr(body, cells)
                                                     : discretize_gaussian(body, cells, cond_sigma);
      ConductanceOptions o;
      o.mode = mode == "exact" ? ConductanceMode::exact : ConductanceMode::sweep;
      o.split_atoms = split;
      o.seed = cond_seed.value_or(0);
      const ConductanceResult r = s_conductance(chain, s, o);
      std::string bits;
      for (std::size_t i = 0; i < chain.size(); ++i) {
        bits += r.fractional_state && *r.fractional_state == i ? 'f' : (r.subset[i] ? '1' : '0');
      }
      std::cout.precision(17);
      std::cout << "subset_bits,measure,flow,ratio\n"
                << bits << ',' << r.subset_measure << ',' << r.subset_flow << ',' << r.value << '\n';
      if (r.upper_bound) std::cerr << "sweep mode: ratio is an upper bound on the infimum\n";
      return 0;
    }
    if (*bound) {
      bp.validate();
      with_output(bound_out, [&](std::ostream& out) {
        out.precision(17);
        out << "name,tag,value,note\n";
        for (const BoundRow& row : bounds_table(bp)) {
          out << row.name << ',' << row.tag << ',' << row.value << ',' << row.note << '\n';
        }
      });
      return 0;
    }
    if (*verify) {
      const RunManifest m = run_preset(preset, parse_overrides(sets), seed, verify_out);
      emit_report(m, std::cout);
      return m.exit_code();
    }
  } catch (const CLI::Error& e) {
    app.exit(e);
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "body spec error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
