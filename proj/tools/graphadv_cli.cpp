// Command-line front end: generate, cluster, attack, sweep, report, replay.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "graphadv/errors.hpp"
#include "graphadv/manifest.hpp"
#include "graphadv/scenario_file.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace graphadv;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Globals {
  std::uint64_t seed = 1;
  std::string backend = "spectral";
  std::string out = "runs";
  std::string scenario;
  int svd_rank = 0;
  int k_max = XMeansParams{}.k_max;
  int walk_length = Node2VecParams{}.walk_length;
  int neighborhood = Node2VecParams{}.context;
  std::uint64_t model_seed = 7;
  int threads = 1;
};

RunManifest base_manifest(const Globals& g, RunCommand cmd) {
  RunManifest m;
  m.command = cmd;
  ScenarioSpec spec = g.scenario.empty() ? desk_scenario(g.seed) : read_scenario(g.scenario);
  m.scenario = format_scenario(spec);
  m.scenario_hash = scenario_hash(spec);
  m.detection.backend = backend_from_string(g.backend);
  m.detection.svd_rank = g.svd_rank;
  m.detection.xmeans.k_max = g.k_max;
  m.detection.node2vec.walk_length = g.walk_length;
  m.detection.node2vec.context = g.neighborhood;
  m.detection.seed = g.seed;
  m.model_seed = g.model_seed;
  m.attack_seed = derive_seed(g.seed, "attack");
  return m;
}

fs::path run(const Globals& g, const RunManifest& m) {
  const fs::path dir = run_directory(g.out, m);
  execute(m, dir);
  return dir;
}

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad sweep value '" + item + "'");
    }
  }
  if (out.empty()) throw UsageError("--values needs at least one value");
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One CSV row per attack run and per sweep value.
void write_report(std::ostream& out, const std::vector<fs::path>& dirs) {
  out << "run,command,backend,attack,success,success_rate,agility_cost\n";
  for (const auto& dir : dirs) {
    const RunManifest m = RunManifest::load(dir / "manifest.json");
    const std::string run = dir.filename().string();
    const std::string backend(to_string(m.detection.backend));
    if (fs::exists(dir / "report.json")) {
      const auto j = nlohmann::json::parse(read_file(dir / "report.json"));
      std::string rate;
      if (j.contains("surface")) rate = std::to_string(j["surface"]["success_rate"].get<double>());
      out << run << ',' << to_string(m.command) << ',' << backend << ',' << j["attack"].get<std::string>() << ','
          << j["success"].get<bool>() << ',' << rate << ',' << j["agility_cost"].get<double>() << '\n';
    }
    if (fs::exists(dir / "sweep.csv")) {
      std::istringstream sweep(read_file(dir / "sweep.csv"));
      std::string line;
      std::getline(sweep, line);  // header
      while (std::getline(sweep, line)) {
        std::stringstream fields(line);
        std::string param, value, rate;
        std::getline(fields, param, ',');
        std::getline(fields, value, ',');
        std::getline(fields, rate, ',');
        out << run << ",sweep," << backend << ',' << param << '=' << value << ",," << rate << ",\n";
      }
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attacks and defenses for graph-based domain clustering"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--backend", g.backend, "community | spectral | node2vec")
      ->check(CLI::IsMember({"community", "spectral", "node2vec"}));
  app.add_option("--out", g.out, "Directory holding run directories");
  app.add_option("--scenario", g.scenario, "Scenario file (default: built-in desk scenario)");
  app.add_option("--svd-rank", g.svd_rank, "Spectral rank, 0 = scree plot");
  app.add_option("--k-max", g.k_max, "XMeans upper bound on clusters");
  app.add_option("--walk-length", g.walk_length, "node2vec walk length");
  app.add_option("--neighborhood-size", g.neighborhood, "node2vec context size");
  app.add_option("--model-seed", g.model_seed, "Seed of the detector's training corpus");
  app.add_option("--threads", g.threads, "Grid worker threads");

  auto* generate = app.add_subcommand("generate", "Scenario to edge list and labels");

  auto* cluster = app.add_subcommand("cluster", "Edge list to clusters and predictions");
  std::string edges;
  cluster->add_option("--edges", edges, "host<TAB>domain edge list (default: the scenario's graph)");

  auto* attack = app.add_subcommand("attack", "Run one attack against the detector");
  std::string attack_kind;
  AttackSpec spec;
  std::string knowledge = "minimal";
  attack->add_option("kind", attack_kind, "noise | smallcom")->required()->check(CLI::IsMember({"noise", "smallcom"}));
  attack->add_option("--m", spec.m, "Noise rounds");
  attack->add_option("--knowledge", knowledge, "minimal | moderate | perfect")
      ->check(CLI::IsMember({"minimal", "moderate", "perfect"}));
  attack->add_option("--nv", spec.n_v, "Domains removed");
  attack->add_option("--ne", spec.n_e, "Edges removed per kept domain");
  attack->add_flag("--grid", spec.grid, "Enumerate every (kept domains, kept hosts) cell");
  attack->add_option("--domain-stride", spec.grid_spec.domain_stride, "Grid stride over kept domains");
  attack->add_option("--host-stride", spec.grid_spec.host_stride, "Grid stride over kept hosts");
  attack->add_option("--death-star-share", spec.grid_spec.death_star_share, "Death-star target share bound");

  auto* sweep = app.add_subcommand("sweep", "Attack success rate across hyperparameter values");
  std::string param, values;
  GridSpec sweep_grid;
  sweep->add_option("--param", param, "svd-rank | walk-length | neighborhood-size")
      ->required()
      ->check(CLI::IsMember({"svd-rank", "walk-length", "neighborhood-size"}));
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--domain-stride", sweep_grid.domain_stride, "Grid stride over kept domains");
  sweep->add_option("--host-stride", sweep_grid.host_stride, "Grid stride over kept hosts");

  auto* report = app.add_subcommand("report", "Aggregate run results into one CSV");
  std::vector<std::string> report_dirs;
  report->add_option("runs", report_dirs, "Run directories (default: every run under --out)");

  auto* replay_cmd = app.add_subcommand("replay", "Re-run a manifest and compare outputs byte for byte");
  std::string replay_dir;
  replay_cmd->add_option("run", replay_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) {
      std::cout << run(g, base_manifest(g, RunCommand::generate)).string() << '\n';
    } else if (*cluster) {
      RunManifest m = base_manifest(g, RunCommand::cluster);
      if (!edges.empty()) {
        m.scenario.clear();
        m.scenario_hash.clear();
        m.input_edges = fs::absolute(edges).string();
        m.input_hash = file_hash(edges);
      }
      std::cout << run(g, m).string() << '\n';
    } else if (*attack) {
      RunManifest m = base_manifest(g, RunCommand::attack);
      spec.kind = attack_kind_from_string(attack_kind);
      spec.knowledge = knowledge_from_string(knowledge);
      spec.threads = g.threads;
      if (spec.kind == AttackSpec::Kind::noise && (spec.m < 1)) throw UsageError("--m must be at least 1");
      if (spec.grid_spec.domain_stride == 0 || spec.grid_spec.host_stride == 0)
        throw UsageError("grid strides must be positive");
      m.attack = spec;
      const fs::path dir = run(g, m);
      const auto j = nlohmann::json::parse(read_file(dir / "report.json"));
      std::cout << dir.string() << '\n' << "success: " << (j["success"].get<bool>() ? "yes" : "no") << '\n';
      if (j.contains("surface")) std::cout << "success rate: " << j["surface"]["success_rate"].get<double>() << '\n';
    } else if (*sweep) {
      RunManifest m = base_manifest(g, RunCommand::sweep);
      if (sweep_grid.domain_stride == 0 || sweep_grid.host_stride == 0) throw UsageError("grid strides must be positive");
      m.sweep = SweepSpec{sweep_param_from_string(param), parse_values(values), sweep_grid};
      for (int v : m.sweep->values) with_parameter(m.detection, m.sweep->param, v);
      const fs::path dir = run(g, m);
      std::cout << dir.string() << '\n' << read_file(dir / "sweep.csv");
    } else if (*report) {
      std::vector<fs::path> dirs;
      if (report_dirs.empty()) {
        if (!fs::is_directory(g.out)) throw DataError("no run directory " + g.out);
        for (const auto& e : fs::directory_iterator(g.out))
          if (fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
        std::sort(dirs.begin(), dirs.end());
      } else {
        for (const auto& d : report_dirs) dirs.emplace_back(d);
      }
      write_report(std::cout, dirs);
    } else if (*replay_cmd) {
      const fs::path scratch = fs::temp_directory_path() / ("graphadv-replay-" + fs::path(replay_dir).filename().string());
      fs::remove_all(scratch);
      const ReplayResult r = replay(replay_dir, scratch);
      fs::remove_all(scratch);
      if (!r.identical) {
        for (const auto& n : r.mismatched) std::cerr << "differs: " << n << '\n';
        return kInternal;
      }
      std::cout << "identical\n";
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kOk;
}
