#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "graphadv/errors.hpp"
#include "graphadv/manifest.hpp"
#include "graphadv/scenario_file.hpp"
#include "json.hpp"

using namespace graphadv;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("graphadv-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

RunManifest desk_manifest(RunCommand cmd) {
  RunManifest m;
  m.command = cmd;
  const ScenarioSpec spec = desk_scenario(1);
  m.scenario = format_scenario(spec);
  m.scenario_hash = scenario_hash(spec);
  m.detection.backend = Backend::community;
  m.attack_seed = derive_seed(1, "attack");
  return m;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(GRAPHADV_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("an empty graph yields an empty clustering") {
  const ForestModel model = default_detector();
  for (auto b : {Backend::community, Backend::spectral, Backend::node2vec}) {
    DetectionConfig cfg;
    cfg.backend = b;
    auto d = run_detection(BipartiteGraph{}, cfg, model);
    CHECK(d.clustering.size() == 0);
    CHECK(d.predictions.empty());
  }
}

TEST_CASE("manifest JSON round trip and stable hash") {
  RunManifest m = desk_manifest(RunCommand::attack);
  AttackSpec a;
  a.kind = AttackSpec::Kind::smallcom;
  a.grid = true;
  a.grid_spec.domain_stride = 6;
  m.attack = a;
  auto back = RunManifest::from_json(m.to_json());
  CHECK(back.to_json() == m.to_json());
  CHECK(back.hash() == m.hash());
  back.artifacts.push_back("x.csv");
  CHECK(back.hash() == m.hash());
  back.detection.seed = 2;
  CHECK(back.hash() != m.hash());
  CHECK_THROWS_AS(RunManifest::from_json("{}"), DataError);
}

TEST_CASE("identity attack reproduces the baseline clustering and replays") {
  RunManifest m = desk_manifest(RunCommand::attack);
  m.attack = AttackSpec{};
  m.attack->kind = AttackSpec::Kind::identity;
  const fs::path out = scratch("identity");
  const fs::path dir = run_directory(out, m);
  auto done = execute(m, dir);
  CHECK(!done.artifacts.empty());
  CHECK(slurp(dir / "clusters_after.json") == slurp(dir / "clusters.json"));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(nlohmann::json::parse(slurp(dir / "report.json"))["attack"] == "identity");

  auto r = replay(dir, out / "replay");
  CHECK(r.identical);
  CHECK(r.mismatched.empty());

  // Tampering with an artifact is caught.
  std::ofstream(dir / "clusters.json", std::ios::app) << " ";
  auto bad = replay(dir, out / "replay2");
  CHECK(!bad.identical);
  CHECK(std::find(bad.mismatched.begin(), bad.mismatched.end(), "clusters.json") != bad.mismatched.end());
  fs::remove_all(out);
}

TEST_CASE("generate writes the scenario and its graph") {
  const RunManifest m = desk_manifest(RunCommand::generate);
  const fs::path out = scratch("generate");
  const fs::path dir = run_directory(out, m);
  execute(m, dir);
  for (const char* f : {"scenario.txt", "edges.tsv", "labels.tsv", "reference.tsv", "manifest.json"})
    CHECK(fs::exists(dir / f));
  CHECK(read_edge_list(dir / "edges.tsv") == build_scenario(desk_scenario(1)).graph);
  CHECK(RunManifest::load(dir / "manifest.json").hash() == m.hash());
  fs::remove_all(out);
}

TEST_CASE("command-line exit codes") {
  const fs::path out = scratch("cli");
  const std::string o = " --out " + out.string() + " ";
  CHECK(cli("--backend community" + o + "cluster") == 0);
  CHECK(cli(o + "attack bogus") == 1);
  CHECK(cli(o) == 1);
  CHECK(cli("--backend community --svd-rank 3" + o + "sweep --param svd-rank --values 3") == 1);
  CHECK(cli("--scenario /nonexistent/scenario.txt" + o + "generate") == 2);
  {
    std::ofstream(out / "bad.tsv") << "only-one-column\n";
  }
  CHECK(cli("--backend community" + o + "cluster --edges " + (out / "bad.tsv").string()) == 2);
  CHECK(cli(o + "report") == 0);
  for (const auto& e : fs::directory_iterator(out))
    if (fs::is_directory(e.path())) CHECK(cli("replay " + e.path().string()) == 0);
  fs::remove_all(out);
}

}  // TEST_SUITE
