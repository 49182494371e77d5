#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "coordhr/bounds.hpp"
#include "coordhr/diagnostics.hpp"
#include "coordhr/geometry.hpp"
#include "coordhr/rng.hpp"

namespace coordhr {

using Json = nlohmann::json;

std::string code_version();

/// Everything that determines a run. The canonical form is the JSON object
/// with sorted keys, so the hash does not depend on field order.
struct ExperimentConfig {
  std::optional<std::filesystem::path> body_file;
  std::string scheme = "chr";
  double sigma = 1e-3;
  int tau = 0;
  double M = 4.0;
  std::size_t steps = 0;
  std::size_t chains = 0;
  std::vector<std::size_t> checkpoints;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
  BoundParams bounds{};
  Json extra = Json::object();  // preset-specific overrides

  /// Checks referenced files and the bound parameters. Throws
  /// std::invalid_argument naming the field.
  void validate() const;
};

Json to_json(const ExperimentConfig& config);
/// Unknown top-level keys land in `extra`.
ExperimentConfig config_from_json(const Json& j);
/// 16 hex digits of FNV-1a over the canonical serialization, output_dir
/// excluded.
std::string config_hash(const ExperimentConfig& config);

struct CheckResult {
  std::string name;
  std::string tag;  // which result of the analysis the check exercises
  double measured = 0.0;
  double bound = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string detail;
};

struct OutputFile {
  std::string path;
  std::string hash;  // FNV-1a of the contents
};

struct RunManifest {
  std::string preset;
  std::string config_hash;
  std::string code_version;
  std::uint64_t master_seed = 0;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  std::string started;
  std::string finished;
  double elapsed_seconds = 0.0;
  std::vector<OutputFile> outputs;
  std::vector<CheckResult> checks;

  /// fail if any check failed, else inconclusive if any was, else pass.
  Verdict overall() const;
  /// 0 pass, 1 fail, 2 inconclusive.
  int exit_code() const;
};

Json to_json(const RunManifest& manifest);

/// Header plus one line per check:
/// `VERDICT: name [tag] measured=... bound=... detail`.
void emit_report(const RunManifest& manifest, std::ostream& out);
/// Writes report.txt and manifest.json into `dir`.
void emit_report(const RunManifest& manifest, const std::filesystem::path& dir);

std::string hash_file(const std::filesystem::path& path);

/// Documented preset names, including the aliases lemma11 and lemma12.
const std::vector<std::string>& preset_names();

/// Seed for one instance of a preset:
/// derive_seed(master, {hash_label(preset), instance}).
std::uint64_t preset_seed(std::uint64_t master, const std::string& preset,
                          std::uint64_t instance);

/// Runs a preset with the given overrides (a JSON object; unknown keys are
/// rejected) and writes CSVs, report.txt and manifest.json into `out_dir` when
/// it is non-empty. Throws std::invalid_argument for unknown presets.
RunManifest run_preset(const std::string& name, const Json& overrides, std::uint64_t seed,
                       const std::filesystem::path& out_dir = {});

/// Random h-polytope with B_inf inside it: Gaussian directions a_i with
/// b_i = ||a_i||_1 (1 + U), intersected with the box |x_j| <= R, R in [1, 3].
ConvexBody random_sandwiched_polytope(int n, Rng& rng, int facets = 0);

}  // namespace coordhr
