#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "graphadv/features.hpp"
#include "graphadv/forest.hpp"
#include "graphadv/graph.hpp"
#include "graphadv/synth.hpp"

namespace graphadv {

inline const std::string kBenignClass = "benign";

struct LabeledClusters {
  std::vector<std::vector<std::string>> clusters;
  std::vector<std::string> labels;

  void append(const LabeledClusters& other);
};

struct TrainingCorpusSpec {
  std::vector<DgaFamilySpec> families = default_family_catalog();
  std::size_t clusters_per_family = 40;
  /// Family clusters carry up to this share of background names on top.
  double family_contamination = 0.3;
  std::size_t background_clusters = 30;
  std::size_t benign_dga_clusters = 10;
  /// Benign clusters that hold a minority of DGA domains from any family.
  std::size_t noisy_benign_clusters = 40;
  double noisy_max_dga_share = 0.4;
  std::size_t min_size = 2;
  std::size_t max_size = 80;
  std::uint64_t seed = 7;
};

/// Clusters of fresh family domains (same generators, unseen seeds) plus a
/// benign class of background-name, benign-DGA and noisy mixed clusters.
LabeledClusters synthetic_training_clusters(const TrainingCorpusSpec& spec);

std::vector<std::vector<double>> feature_matrix(const LabeledClusters& data);

ForestModel train_detector(const LabeledClusters& data, const ForestParams& params, std::uint64_t seed);

/// Default detector: synthetic corpus with the default spec.
ForestModel default_detector(std::uint64_t seed = 7);

struct ClusterScore {
  int cluster = 0;
  std::size_t size = 0;
  std::size_t target_domains = 0;
  std::string predicted;
  double true_probability = 0.0;
};

/// P(family) for every cluster holding at least one domain labeled `family`.
std::vector<ClusterScore> cluster_true_class_probability(const ForestModel& model, const Clustering& clustering,
                                                         const std::map<std::string, std::string>& labels,
                                                         const std::string& family);

struct CrossValidation {
  double accuracy = 0.0;
  std::map<std::string, double> false_positive_rate;  // per class, one-vs-rest
};

/// Stratified k-fold cross-validation.
CrossValidation cross_validate(const LabeledClusters& data, int folds, const ForestParams& params,
                               std::uint64_t seed);

}  // namespace graphadv
