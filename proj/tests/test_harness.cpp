#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coordhr/harness.hpp"

using namespace coordhr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "coordhr_harness_test" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config hash ignores key order") {
  ExperimentConfig c;
  c.scheme = "gaussian";
  c.sigma = 0.01;
  c.checkpoints = {1, 2, 4};
  const Json j = to_json(c);

  // Rebuild the object with keys inserted in reverse order.
  Json reversed = Json::object();
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  std::reverse(keys.begin(), keys.end());
  for (const auto& k : keys) reversed[k] = j[k];
  CHECK(config_hash(config_from_json(reversed)) == config_hash(c));
  CHECK(config_hash(c).size() == 16);

  ExperimentConfig d = c;
  d.sigma = 0.02;
  CHECK(config_hash(d) != config_hash(c));

  Json extra = j;
  extra["bins"] = 12;
  CHECK(config_from_json(extra).extra["bins"] == 12);
}

TEST_CASE("config validation") {
  ExperimentConfig c;
  CHECK_NOTHROW(c.validate());
  c.body_file = "/nonexistent/body.spec";
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.body_file.reset();
  c.bounds.eps = 0.9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("preset seeds") {
  CHECK(preset_seed(1, "pinsker", 0) == derive_seed(1, {hash_label("pinsker"), 0}));
  CHECK(preset_seed(1, "pinsker", 0) != preset_seed(1, "pinsker", 1));
  CHECK(preset_seed(1, "pinsker", 0) != preset_seed(1, "coupling", 0));
  CHECK(preset_seed(1, "pinsker", 0) != preset_seed(2, "pinsker", 0));
}

TEST_CASE("report format") {
  RunManifest m;
  m.preset = "empty";
  m.config_hash = "0123456789abcdef";
  m.code_version = code_version();
  m.master_seed = 9;
  std::ostringstream os;
  emit_report(m, os);
  const std::string header = os.str();
  CHECK(header.find("# preset: empty") != std::string::npos);
  CHECK(header.find(": ") != std::string::npos);
  CHECK(header.find("PASS") == std::string::npos);
  CHECK(m.overall() == Verdict::pass);
  CHECK(m.exit_code() == 0);

  m.checks.push_back({"floor", "tag-a", 0.1, 0.05, Verdict::inconclusive, "noise floor too high"});
  std::ostringstream os2;
  emit_report(m, os2);
  CHECK(os2.str().find("INCONCLUSIVE: floor [tag-a]") != std::string::npos);
  CHECK(m.exit_code() == 2);

  m.checks.push_back({"bad", "tag-b", 2.0, 1.0, Verdict::fail, ""});
  CHECK(m.overall() == Verdict::fail);
  CHECK(m.exit_code() == 1);

  const Json j = to_json(m);
  CHECK(j["checks"].size() == 2);
  CHECK(j["master_seed"] == 9);
}

TEST_CASE("bounds-table preset") {
  const RunManifest m = run_preset("bounds-table", Json::object(), 1);
  REQUIRE_FALSE(m.checks.empty());
  CHECK(m.checks.front().name == "theorem_main_bound");
  CHECK(m.checks.front().measured == 7557.0);
  CHECK(m.exit_code() == 0);
}

TEST_CASE("pinsker preset passes") {
  const RunManifest m = run_preset("pinsker", Json::object(), 3);
  CHECK(m.overall() == Verdict::pass);
  CHECK_FALSE(m.seeds.empty());
}

TEST_CASE("identical seeds give identical outputs") {
  const fs::path a = scratch("a"), b = scratch("b");
  const RunManifest ma = run_preset("flow-symmetry", Json::object(), 42, a);
  const RunManifest mb = run_preset("flow-symmetry", Json::object(), 42, b);
  REQUIRE_FALSE(ma.outputs.empty());
  REQUIRE(ma.outputs.size() == mb.outputs.size());
  for (std::size_t i = 0; i < ma.outputs.size(); ++i) {
    CHECK(ma.outputs[i].hash == mb.outputs[i].hash);
  }
  CHECK(ma.config_hash == mb.config_hash);
  CHECK(fs::exists(a / "report.txt"));
  CHECK(fs::exists(a / "manifest.json"));
  const Json j = Json::parse(slurp(a / "manifest.json"));
  CHECK(j["preset"] == "flow-symmetry");
  CHECK(j["master_seed"] == 42);
  CHECK(hash_file(a / "flow_symmetry.csv") == hash_file(b / "flow_symmetry.csv"));

  const RunManifest mc = run_preset("flow-symmetry", Json::object(), 43);
  CHECK(mc.overall() == Verdict::pass);
}

TEST_CASE("overrides and names") {
  const RunManifest m = run_preset("pinsker", Json{{"instances", 10}}, 3);
  CHECK(m.overall() == Verdict::pass);
  CHECK(m.config_hash != run_preset("pinsker", Json::object(), 3).config_hash);
  CHECK_THROWS_AS(run_preset("pinsker", Json{{"no_such_key", 1}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(run_preset("no-such-preset", Json::object(), 3), std::invalid_argument);

  const auto& names = preset_names();
  CHECK(std::find(names.begin(), names.end(), "lemma11") != names.end());
  CHECK(std::find(names.begin(), names.end(), "scaling") != names.end());
}

TEST_CASE("random sandwiched polytopes contain the inner cube") {
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng.index(3));
    const ConvexBody p = random_sandwiched_polytope(n, rng);
    const SandwichReport s = sandwich_validate(p);
    CHECK(s.inner_ok);
    CHECK(s.outer_ok);
  }
}
