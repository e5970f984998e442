#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "graphadv/attacks.hpp"
#include "graphadv/forest.hpp"
#include "graphadv/pipeline.hpp"
#include "graphadv/training.hpp"

namespace graphadv {

// ---- Validity indices -----------------------------------------------------

struct ValidityIndices {
  double ari = 0.0;
  double nmi = 0.0;  // arithmetic-mean normalization
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
  double fowlkes_mallows = 0.0;
  double purity = 0.0;
};

/// Indices of a predicted partition against reference classes, both given as
/// one label per item. Throws DataError if the reference has fewer than two
/// classes or the sizes differ.
ValidityIndices validity_indices(const std::vector<int>& predicted, const std::vector<int>& reference);

/// Same, restricted to the clustered domains that carry a reference label.
ValidityIndices validity_indices(const Clustering& c, const std::map<std::string, std::string>& reference);

// ---- Retraining with noise ------------------------------------------------

/// Desk scenarios cycling through the family catalog as the planted family.
std::vector<ScenarioSpec> family_scenarios(std::size_t count, std::uint64_t seed);

/// Clusters produced by a noise attack, labeled with the planted family.
/// Every attacker of every scenario is attacked with `m` rounds from the
/// knowledge-level source; post-attack clusters in which the family makes up
/// at least `min_target_share` of the domains are kept.
LabeledClusters noise_attack_clusters(const std::vector<ScenarioSpec>& scenarios, const DetectionConfig& cfg,
                                      const ForestModel& model, int m, Knowledge knowledge, std::uint64_t seed,
                                      double min_target_share = 0.25);

/// Retrains with the model's own training set plus the adversarial clusters,
/// keeping its forest parameters.
ForestModel retrain_with_noise(const ForestModel& model, const LabeledClusters& adversarial, std::uint64_t seed);

struct RetrainEvaluation {
  double correct_before = 0.0;  // share of attacked clusters given their true label
  double correct_after = 0.0;
  std::map<std::string, double> fpr_before;  // per family, on the holdout corpus
  std::map<std::string, double> fpr_after;
};

RetrainEvaluation evaluate_retraining(const ForestModel& before, const ForestModel& after,
                                      const LabeledClusters& attacked, const LabeledClusters& holdout);

/// One-vs-rest false-positive rate per non-benign class.
std::map<std::string, double> family_false_positive_rates(const ForestModel& model, const LabeledClusters& data);

/// Per-family FPR before and after retraining, one line per family.
void write_fpr_table(std::ostream& out, const RetrainEvaluation& e);

// ---- Hyperparameter sweep -------------------------------------------------

enum class SweepParam { svd_rank, walk_length, neighborhood_size };

std::string_view to_string(SweepParam p);
SweepParam sweep_param_from_string(std::string_view s);

struct SweepRow {
  int value = 0;
  double attack_success_rate = 0.0;
  ValidityIndices quality;
  AttackSurface surface;
};

struct SweepResult {
  SweepParam param = SweepParam::svd_rank;
  std::vector<SweepRow> rows;
};

/// Config with `param` set to `value`. Throws UsageError when the parameter
/// does not belong to the backend or the value is not positive.
DetectionConfig with_parameter(DetectionConfig cfg, SweepParam param, int value);

/// For each value: baseline clustering quality against the scenario's
/// reference labels and the small-community attack surface of the first
/// attacker. Every value uses the same grid and surface seed.
SweepResult sweep_hyperparameter(const Scenario& scenario, const DetectionConfig& base, SweepParam param,
                                 const std::vector<int>& values, const ForestModel& model, const GridSpec& grid,
                                 std::uint64_t seed, int threads = 1);

void write_sweep_csv(std::ostream& out, const SweepResult& r);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace graphadv
