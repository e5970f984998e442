#include "graphadv/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "graphadv/errors.hpp"
#include "graphadv/rng.hpp"
#include "graphadv/scenario_file.hpp"
#include "graphadv/spectral.hpp"
#include "graphadv/training.hpp"
#include "json.hpp"

namespace graphadv {

using nlohmann::json;

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json detection_json(const DetectionConfig& c) {
  return {{"backend", std::string(to_string(c.backend))},
          {"svd_rank", c.svd_rank},
          {"scree_values", c.scree_values},
          {"scree_threshold", c.scree_threshold},
          {"node2vec",
           {{"dimensions", c.node2vec.dimensions},
            {"walk_length", c.node2vec.walk_length},
            {"walks_per_node", c.node2vec.walks_per_node},
            {"context", c.node2vec.context},
            {"epochs", c.node2vec.epochs},
            {"negatives", c.node2vec.negatives},
            {"learning_rate", c.node2vec.learning_rate},
            {"min_learning_rate", c.node2vec.min_learning_rate}}},
          {"xmeans",
           {{"k_min", c.xmeans.k_min},
            {"k_max", c.xmeans.k_max},
            {"max_lloyd_iterations", c.xmeans.max_lloyd_iterations}}},
          {"seed", c.seed}};
}

DetectionConfig detection_from_json(const json& j) {
  DetectionConfig c;
  c.backend = backend_from_string(j.at("backend").get<std::string>());
  c.svd_rank = j.at("svd_rank");
  c.scree_values = j.at("scree_values");
  c.scree_threshold = j.at("scree_threshold");
  const auto& n = j.at("node2vec");
  c.node2vec.dimensions = n.at("dimensions");
  c.node2vec.walk_length = n.at("walk_length");
  c.node2vec.walks_per_node = n.at("walks_per_node");
  c.node2vec.context = n.at("context");
  c.node2vec.epochs = n.at("epochs");
  c.node2vec.negatives = n.at("negatives");
  c.node2vec.learning_rate = n.at("learning_rate");
  c.node2vec.min_learning_rate = n.at("min_learning_rate");
  const auto& x = j.at("xmeans");
  c.xmeans.k_min = x.at("k_min");
  c.xmeans.k_max = x.at("k_max");
  c.xmeans.max_lloyd_iterations = x.at("max_lloyd_iterations");
  c.seed = j.at("seed");
  return c;
}

json grid_json(const GridSpec& g) {
  return {{"domain_stride", g.domain_stride}, {"host_stride", g.host_stride}, {"death_star_share", g.death_star_share}};
}

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  g.domain_stride = j.at("domain_stride");
  g.host_stride = j.at("host_stride");
  g.death_star_share = j.at("death_star_share");
  return g;
}

// Manifest body without the artifact list.
json body_json(const RunManifest& m) {
  json j;
  j["format"] = "graphadv-run-manifest";
  j["version"] = RunManifest::kVersion;
  j["tool_version"] = m.tool_version;
  j["command"] = std::string(to_string(m.command));
  j["scenario"] = m.scenario;
  j["scenario_hash"] = m.scenario_hash;
  j["input_edges"] = m.input_edges;
  j["input_hash"] = m.input_hash;
  j["detection"] = detection_json(m.detection);
  j["seeds"] = {{"detection", m.detection.seed}, {"model", m.model_seed}, {"attack", m.attack_seed}};
  if (m.attack) {
    const auto& a = *m.attack;
    j["attack"] = {{"kind", std::string(to_string(a.kind))},
                   {"m", a.m},
                   {"knowledge", std::string(to_string(a.knowledge))},
                   {"n_v", a.n_v},
                   {"n_e", a.n_e},
                   {"grid", a.grid},
                   {"grid_spec", grid_json(a.grid_spec)},
                   {"attacker", a.attacker}};
  }
  if (m.sweep)
    j["sweep"] = {{"param", std::string(to_string(m.sweep->param))},
                  {"values", m.sweep->values},
                  {"grid_spec", grid_json(m.sweep->grid)}};
  return j;
}

class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::ofstream open(const std::string& name) {
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir_ / name).string());
    names_.push_back(name);
    return out;
  }
  std::filesystem::path path(const std::string& name) {
    names_.push_back(name);
    return dir_ / name;
  }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
};

ScenarioSpec scenario_of(const RunManifest& m) {
  if (m.scenario.empty()) throw DataError("manifest has no scenario");
  std::istringstream in(m.scenario);
  ScenarioSpec spec = parse_scenario(in);
  if (scenario_hash(spec) != m.scenario_hash) throw DataError("manifest scenario does not match its hash");
  return spec;
}

void write_detection(ArtifactWriter& w, const Detection& d, const ForestModel& model) {
  write_clusters_json(w.path("clusters.json"), d.clustering);
  write_predictions_csv(w.path("predictions.csv"), d, model);
  if (!d.scree.empty()) {
    auto out = w.open("scree.csv");
    write_scree_csv(out, d.scree);
  }
  auto out = w.open("detection.json");
  json j{{"svd_rank", d.svd_rank},
         {"rank_plateaued", d.rank_plateaued},
         {"clusters", d.clustering.num_clusters()},
         {"clustered_domains", d.clustering.size()},
         {"filtered_hosts", d.filtered.num_hosts()}};
  out << j.dump(2) << '\n';
}

void run_generate(ArtifactWriter& w, const ScenarioSpec& spec) {
  const Scenario s = build_scenario(spec);
  w.open("scenario.txt") << format_scenario(spec);
  write_edge_list(w.path("edges.tsv"), s.graph);
  auto labels = w.open("labels.tsv");
  labels << "# domain\tfamily\n";
  for (const auto& [d, f] : s.labels) labels << d << '\t' << f << '\n';
  auto ref = w.open("reference.tsv");
  ref << "# domain\tgroup\n";
  for (const auto& [d, g] : s.reference_labels) ref << d << '\t' << g << '\n';
}

void run_attack(ArtifactWriter& w, const RunManifest& m, const ForestModel& model) {
  const ScenarioSpec spec = scenario_of(m);
  const Scenario s = build_scenario(spec);
  const AttackExperiment x = run_attack_experiment(spec, s, m.detection, model, *m.attack, m.attack_seed);
  write_detection(w, x.baseline, model);
  if (x.after) write_clusters_json(w.path("clusters_after.json"), *x.after);
  w.open("report.json") << x.report.to_json() << '\n';
  if (!x.anomaly_variants.empty()) {
    auto table = w.open("anomaly.txt");
    write_anomaly_table(table, x.anomaly_variants);
    auto csv = w.open("anomaly.csv");
    write_anomaly_csv(csv, x.anomaly_variants);
  }
  if (x.report.surface) {
    auto out = w.open("success_matrix.csv");
    write_success_matrix_csv(out, *x.report.surface);
  }
}

void run_sweep(ArtifactWriter& w, const RunManifest& m, const ForestModel& model) {
  const Scenario s = build_scenario(scenario_of(m));
  const auto& sw = *m.sweep;
  const SweepResult r = sweep_hyperparameter(s, m.detection, sw.param, sw.values, model, sw.grid, m.attack_seed);
  auto out = w.open("sweep.csv");
  write_sweep_csv(out, r);
  for (const auto& row : r.rows) {
    auto matrix = w.open("success_matrix_" + std::to_string(row.value) + ".csv");
    write_success_matrix_csv(matrix, row.surface);
  }
}

}  // namespace

std::string_view to_string(RunCommand c) {
  switch (c) {
    case RunCommand::generate: return "generate";
    case RunCommand::cluster: return "cluster";
    case RunCommand::attack: return "attack";
    case RunCommand::sweep: return "sweep";
  }
  return "?";
}

RunCommand run_command_from_string(std::string_view s) {
  if (s == "generate") return RunCommand::generate;
  if (s == "cluster") return RunCommand::cluster;
  if (s == "attack") return RunCommand::attack;
  if (s == "sweep") return RunCommand::sweep;
  throw DataError("unknown run command '" + std::string(s) + "'");
}

std::string RunManifest::hash() const { return hex(hash_string(body_json(*this).dump())); }

std::string RunManifest::to_json() const {
  json j = body_json(*this);
  j["artifacts"] = artifacts;
  return j.dump(2);
}

RunManifest RunManifest::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "graphadv-run-manifest") throw DataError("not a run manifest");
    if (j.at("version") != kVersion) throw DataError("unsupported manifest version");
    RunManifest m;
    m.tool_version = j.at("tool_version");
    m.command = run_command_from_string(j.at("command").get<std::string>());
    m.scenario = j.at("scenario");
    m.scenario_hash = j.at("scenario_hash");
    m.input_edges = j.at("input_edges");
    m.input_hash = j.at("input_hash");
    m.detection = detection_from_json(j.at("detection"));
    m.model_seed = j.at("seeds").at("model");
    m.attack_seed = j.at("seeds").at("attack");
    if (j.contains("attack")) {
      const auto& a = j["attack"];
      AttackSpec s;
      s.kind = attack_kind_from_string(a.at("kind").get<std::string>());
      s.m = a.at("m");
      s.knowledge = knowledge_from_string(a.at("knowledge").get<std::string>());
      s.n_v = a.at("n_v");
      s.n_e = a.at("n_e");
      s.grid = a.at("grid");
      s.grid_spec = grid_from_json(a.at("grid_spec"));
      s.attacker = a.at("attacker");
      m.attack = s;
    }
    if (j.contains("sweep")) {
      SweepSpec s;
      s.param = sweep_param_from_string(j["sweep"].at("param").get<std::string>());
      s.values = j["sweep"].at("values").get<std::vector<int>>();
      s.grid = grid_from_json(j["sweep"].at("grid_spec"));
      m.sweep = s;
    }
    m.artifacts = j.value("artifacts", std::vector<std::string>{});
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("bad run manifest: ") + e.what());
  } catch (const UsageError& e) {
    throw DataError(std::string("bad run manifest: ") + e.what());
  }
}

void RunManifest::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << to_json() << '\n';
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string file_hash(const std::filesystem::path& path) { return hex(hash_string(slurp(path))); }

std::filesystem::path run_directory(const std::filesystem::path& out, const RunManifest& m) {
  return out / m.hash();
}

RunManifest execute(RunManifest m, const std::filesystem::path& dir) {
  // A failed run leaves no half-written directory behind.
  const bool fresh = !std::filesystem::exists(dir);
  std::filesystem::create_directories(dir);
  try {
    ArtifactWriter w(dir);
    switch (m.command) {
      case RunCommand::generate: run_generate(w, scenario_of(m)); break;
      case RunCommand::cluster: {
        BipartiteGraph g;
        if (!m.input_edges.empty()) {
          if (file_hash(m.input_edges) != m.input_hash)
            throw DataError("input edge list " + m.input_edges + " changed since the manifest was written");
          g = read_edge_list(std::filesystem::path(m.input_edges));
        } else {
          g = build_scenario(scenario_of(m)).graph;
        }
        const ForestModel model = default_detector(m.model_seed);
        write_detection(w, run_detection(g, m.detection, model), model);
        break;
      }
      case RunCommand::attack:
        if (!m.attack) throw DataError("attack manifest without attack settings");
        run_attack(w, m, default_detector(m.model_seed));
        break;
      case RunCommand::sweep:
        if (!m.sweep) throw DataError("sweep manifest without sweep settings");
        run_sweep(w, m, default_detector(m.model_seed));
        break;
    }
    m.artifacts = w.names();
    m.save(dir / "manifest.json");
  } catch (...) {
    if (fresh) std::filesystem::remove_all(dir);
    throw;
  }
  return m;
}

ReplayResult replay(const std::filesystem::path& run_dir, const std::filesystem::path& scratch_dir) {
  const RunManifest original = RunManifest::load(run_dir / "manifest.json");
  const RunManifest again = execute(original, scratch_dir);
  ReplayResult r;
  auto names = original.artifacts;
  for (const auto& n : again.artifacts)
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  names.push_back("manifest.json");
  for (const auto& n : names) {
    const auto a = run_dir / n, b = scratch_dir / n;
    if (!std::filesystem::exists(a) || !std::filesystem::exists(b) || slurp(a) != slurp(b)) {
      r.identical = false;
      r.mismatched.push_back(n);
    }
  }
  return r;
}

}  // namespace graphadv
