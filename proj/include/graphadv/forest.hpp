#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace graphadv {

struct ForestParams {
  int trees = 100;
  int max_depth = 0;  // 0 = unlimited
  int min_leaf = 1;
  int mtry = 0;       // 0 = floor(sqrt(features))
};

struct DecisionTree {
  // Parallel node arrays; feature < 0 marks a leaf.
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<std::vector<double>> value;  // leaf class distribution

  [[nodiscard]] const std::vector<double>& leaf(const std::vector<double>& x) const;
};

class ForestModel {
 public:
  static constexpr int kVersion = 1;

  std::vector<std::string> classes;
  std::vector<DecisionTree> trees;
  ForestParams params;
  std::uint64_t seed = 0;
  int num_features = 0;
  // Training set, kept so the model can be retrained with extra samples.
  std::vector<std::vector<double>> train_x;
  std::vector<std::string> train_y;

  /// Mean of the per-tree leaf distributions, in `classes` order.
  [[nodiscard]] std::vector<double> predict_proba(const std::vector<double>& x) const;
  [[nodiscard]] std::string predict(const std::vector<double>& x) const;
  [[nodiscard]] double probability_of(const std::vector<double>& x, const std::string& cls) const;
  [[nodiscard]] int class_index(const std::string& cls) const;

  [[nodiscard]] std::string to_json() const;
  static ForestModel from_json(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static ForestModel load(const std::filesystem::path& path);
};

/// Bootstrap Gini CART forest. Classes are sorted by name. Throws
/// std::invalid_argument for fewer than 2 classes or a class with < 2 samples.
ForestModel train_forest(const std::vector<std::vector<double>>& x, const std::vector<std::string>& y,
                         const ForestParams& params, std::uint64_t seed);

}  // namespace graphadv
