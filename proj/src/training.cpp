#include "graphadv/training.hpp"

#include <algorithm>
#include <iostream>
#include <unordered_set>

#include "graphadv/rng.hpp"

namespace graphadv {

void LabeledClusters::append(const LabeledClusters& other) {
  clusters.insert(clusters.end(), other.clusters.begin(), other.clusters.end());
  labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

LabeledClusters synthetic_training_clusters(const TrainingCorpusSpec& spec) {
  LabeledClusters out;
  Rng rng(derive_seed(spec.seed, "training-corpus"));
  auto size = [&] { return spec.min_size + rng.uniform(spec.max_size - spec.min_size + 1); };

  // Appends n distinct background names to the cluster.
  auto add_background = [](std::vector<std::string>& cluster, std::size_t n, std::uint64_t seed) {
    BackgroundDomainGenerator gen(seed);
    std::unordered_set<std::string> seen(cluster.begin(), cluster.end());
    for (std::size_t added = 0; added < n;) {
      std::string d = gen.next();
      if (seen.insert(d).second) {
        cluster.push_back(std::move(d));
        ++added;
      }
    }
  };

  for (std::size_t f = 0; f < spec.families.size(); ++f) {
    for (std::size_t c = 0; c < spec.clusters_per_family; ++c) {
      DgaFamilySpec fam = spec.families[f];
      fam.seed = derive_seed(derive_seed(fam.seed, spec.seed), c + 1);
      auto cluster = generate_dga_domains(fam, size());
      const auto extra = static_cast<std::size_t>(rng.uniform01() * spec.family_contamination *
                                                  static_cast<double>(cluster.size()));
      add_background(cluster, extra, derive_seed(fam.seed, "contamination"));
      out.clusters.push_back(std::move(cluster));
      out.labels.push_back(fam.name);
    }
  }
  for (std::size_t c = 0; c < spec.background_clusters; ++c) {
    std::vector<std::string> cluster;
    add_background(cluster, size(), derive_seed(spec.seed, 1000 + c));
    out.clusters.push_back(std::move(cluster));
    out.labels.push_back(kBenignClass);
  }
  for (std::size_t c = 0; c < spec.benign_dga_clusters; ++c) {
    BenignDgaSpec b;
    b.seed = derive_seed(spec.seed, 2000 + c);
    out.clusters.push_back(generate_benign_dga(b, size()));
    out.labels.push_back(kBenignClass);
  }
  for (std::size_t c = 0; c < spec.noisy_benign_clusters && !spec.families.empty(); ++c) {
    const std::size_t n = size();
    const auto dga = static_cast<std::size_t>(rng.uniform01() * spec.noisy_max_dga_share * static_cast<double>(n));
    std::vector<std::string> cluster;
    if (dga > 0) {
      DgaFamilySpec fam = spec.families[rng.uniform(spec.families.size())];
      fam.seed = derive_seed(spec.seed, 3000 + c);
      cluster = generate_dga_domains(fam, dga);
    }
    // The benign remainder is split between background and benign-DGA names.
    const std::size_t rest = n - dga, words = rng.uniform(rest + 1);
    BenignDgaSpec b;
    b.seed = derive_seed(spec.seed, 4000 + c);
    if (words > 0)
      for (auto& d : generate_benign_dga(b, words)) cluster.push_back(std::move(d));
    add_background(cluster, rest - words, derive_seed(spec.seed, 5000 + c));
    out.clusters.push_back(std::move(cluster));
    out.labels.push_back(kBenignClass);
  }
  return out;
}

std::vector<std::vector<double>> feature_matrix(const LabeledClusters& data) {
  std::vector<std::vector<double>> x;
  x.reserve(data.clusters.size());
  for (const auto& c : data.clusters) {
    auto f = extract_features(c);
    x.emplace_back(f.begin(), f.end());
  }
  return x;
}

ForestModel train_detector(const LabeledClusters& data, const ForestParams& params, std::uint64_t seed) {
  return train_forest(feature_matrix(data), data.labels, params, seed);
}

ForestModel default_detector(std::uint64_t seed) {
  TrainingCorpusSpec spec;
  spec.seed = seed;
  return train_detector(synthetic_training_clusters(spec), ForestParams{}, seed);
}

std::vector<ClusterScore> cluster_true_class_probability(const ForestModel& model, const Clustering& clustering,
                                                         const std::map<std::string, std::string>& labels,
                                                         const std::string& family) {
  std::vector<ClusterScore> out;
  const auto members = clustering.members();
  for (std::size_t c = 0; c < members.size(); ++c) {
    std::size_t targets = 0;
    for (const auto& d : members[c]) {
      auto it = labels.find(d);
      if (it != labels.end() && it->second == family) ++targets;
    }
    if (targets == 0) continue;
    auto f = extract_features(members[c]);
    std::vector<double> x(f.begin(), f.end());
    auto p = model.predict_proba(x);
    ClusterScore s;
    s.cluster = static_cast<int>(c);
    s.size = members[c].size();
    s.target_domains = targets;
    s.predicted = model.classes[std::max_element(p.begin(), p.end()) - p.begin()];
    const int ci = model.class_index(family);
    s.true_probability = ci < 0 ? 0.0 : p[ci];
    out.push_back(std::move(s));
  }
  if (out.empty()) std::cerr << "warning: family '" << family << "' has no domains in the clustering\n";
  return out;
}

CrossValidation cross_validate(const LabeledClusters& data, int folds, const ForestParams& params,
                               std::uint64_t seed) {
  const auto x = feature_matrix(data);
  const std::size_t n = x.size();
  // Stratified fold assignment: shuffle each class, deal round-robin.
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);
  std::vector<int> fold(n, 0);
  Rng rng(derive_seed(seed, "cv"));
  int next = 0;
  for (auto& [cls, idx] : by_class) {
    rng.shuffle(idx.begin(), idx.end());
    for (std::size_t i : idx) fold[i] = next++ % folds;
  }

  std::vector<std::string> predicted(n);
  for (int k = 0; k < folds; ++k) {
    std::vector<std::vector<double>> tx;
    std::vector<std::string> ty;
    for (std::size_t i = 0; i < n; ++i)
      if (fold[i] != k) {
        tx.push_back(x[i]);
        ty.push_back(data.labels[i]);
      }
    auto m = train_forest(tx, ty, params, derive_seed(seed, static_cast<std::uint64_t>(k)));
    for (std::size_t i = 0; i < n; ++i)
      if (fold[i] == k) predicted[i] = m.predict(x[i]);
  }

  CrossValidation cv;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < n; ++i) correct += predicted[i] == data.labels[i];
  cv.accuracy = static_cast<double>(correct) / static_cast<double>(n);
  for (const auto& [cls, idx] : by_class) {
    std::size_t negatives = 0, fp = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (data.labels[i] != cls) {
        ++negatives;
        fp += predicted[i] == cls;
      }
    cv.false_positive_rate[cls] = negatives ? static_cast<double>(fp) / static_cast<double>(negatives) : 0.0;
  }
  return cv;
}

}  // namespace graphadv
