#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphadv/attacks.hpp"
#include "graphadv/forest.hpp"
#include "graphadv/graph.hpp"
#include "graphadv/node2vec.hpp"
#include "graphadv/synth.hpp"
#include "graphadv/xmeans.hpp"

namespace graphadv {

struct DetectionConfig {
  Backend backend = Backend::spectral;
  /// Spectral rank; 0 selects it from the scree plot.
  int svd_rank = 0;
  int scree_values = 100;
  double scree_threshold = 0.01;
  Node2VecParams node2vec;
  XMeansParams xmeans;
  std::uint64_t seed = 1;

  /// Flat key/value view recorded in clusterings and manifests.
  [[nodiscard]] std::map<std::string, std::string> hyperparameters() const;
};

struct ClusterPrediction {
  int cluster = 0;
  std::size_t size = 0;
  std::string predicted;
  std::vector<double> probabilities;  // model class order
};

struct Detection {
  BipartiteGraph filtered;
  Clustering clustering;
  std::vector<ClusterPrediction> predictions;
  int svd_rank = 0;
  bool rank_plateaued = true;
  std::vector<double> scree;
};

/// Scree-selected rank of the filtered graph.
ScreeChoice select_rank(const BipartiteGraph& filtered, const DetectionConfig& cfg);

/// Clusters the domains of an already filtered graph with the configured
/// backend. `svd_rank` must be resolved (non-zero) for the spectral backend.
Clustering cluster_domains(const BipartiteGraph& filtered, const DetectionConfig& cfg);

/// Host filtering, clustering and per-cluster prediction.
Detection run_detection(const BipartiteGraph& global, DetectionConfig cfg, const ForestModel& model);

/// Detector for attack experiments: filtering then clustering with a fixed,
/// resolved configuration.
Detector make_detector(const DetectionConfig& resolved);

struct AttackSpec {
  enum class Kind { identity, noise, smallcom };
  Kind kind = Kind::noise;
  int m = 1;
  Knowledge knowledge = Knowledge::minimal;
  std::size_t n_v = 0;
  std::size_t n_e = 0;
  bool grid = false;
  GridSpec grid_spec;
  std::size_t attacker = 0;  // index into the scenario's attacker graphs
  int threads = 1;           // grid workers; results do not depend on it
};

std::string_view to_string(AttackSpec::Kind k);
AttackSpec::Kind attack_kind_from_string(std::string_view s);

struct AttackExperiment {
  Detection baseline;
  DetectionConfig resolved;  // scree rank filled in
  std::optional<Clustering> after;
  AttackReport report;
  /// Noise attacks: anomaly cost of every variant 1..m.
  std::vector<std::pair<std::string, AnomalyCost>> anomaly_variants;
};

/// Baseline detection, the configured attack, re-detection with the same
/// resolved configuration and the verdict. The identity attack re-runs
/// detection on the untouched graph.
AttackExperiment run_attack_experiment(const ScenarioSpec& spec, const Scenario& scenario, const DetectionConfig& cfg,
                                       const ForestModel& model, const AttackSpec& attack, std::uint64_t seed);

void write_clusters_json(const std::filesystem::path& path, const Clustering& c);
void write_predictions_csv(const std::filesystem::path& path, const Detection& d, const ForestModel& model);

}  // namespace graphadv
