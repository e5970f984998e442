#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "graphadv/errors.hpp"
#include "graphadv/features.hpp"
#include "graphadv/forest.hpp"
#include "graphadv/rng.hpp"
#include "graphadv/training.hpp"

using namespace graphadv;

namespace {

double oracle_jaccard(const std::string& a, const std::string& b) {
  std::set<char> sa(a.begin(), a.end()), sb(b.begin(), b.end()), u = sa;
  u.insert(sb.begin(), sb.end());
  std::size_t inter = 0;
  for (char c : sa) inter += sb.count(c);
  return 1.0 - static_cast<double>(inter) / static_cast<double>(u.size());
}

// Mean and max over every unordered pair, by direct enumeration.
std::pair<double, double> pair_mean_max(const std::vector<std::string>& names) {
  double sum = 0, mx = 0;
  int n = 0;
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = 0; j < names.size(); ++j) {
      if (j <= i) continue;
      const double d = oracle_jaccard(names[i], names[j]);
      sum += d;
      mx = std::max(mx, d);
      ++n;
    }
  return {sum / n, mx};
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("summary statistics") {
  auto s = summary_stats({4, 1, 3, 2});
  CHECK(s[0] == 2.5);
  CHECK(s[1] == 2.5);
  CHECK(s[2] == doctest::Approx(std::sqrt(1.25)));
  CHECK(s[3] == 1);
  CHECK(s[4] == 4);
  CHECK(s[5] == 1.75);
  CHECK(s[6] == 3.25);
  CHECK(s[7] == doctest::Approx(0.0));
  CHECK(s[8] == doctest::Approx(std::sqrt(1.25) / 2.5));
}

TEST_CASE("string measures") {
  CHECK(strip_tld("abc.example.com") == "abc.example");
  CHECK(strip_tld("localhost") == "localhost");
  CHECK(char_entropy("aaaa") == 0.0);
  CHECK(char_entropy("abab") == doctest::Approx(1.0));
  CHECK(char_entropy("abcdefgh") <= std::log2(8.0) + 1e-12);
  CHECK(char_jaccard_distance("abc", "abc") == 0.0);
  CHECK(char_jaccard_distance("ab", "cd") == 1.0);
  CHECK(char_jaccard_distance("abc", "bcd") == doctest::Approx(0.5));
  // {ab, bc} vs {bc, cd}: one shared of four.
  CHECK(bigram_dice_distance("abc", "bcd") == doctest::Approx(0.5));
}

TEST_CASE("features are permutation invariant") {
  auto d = generate_dga_domains(default_family_catalog()[1], 40);
  auto f = extract_features(d);
  Rng rng(1);
  rng.shuffle(d.begin(), d.end());
  CHECK(extract_features(d) == f);
  CHECK(feature_names().size() == kNumFeatures);
  CHECK(feature_names().front() == "length_mean");
  CHECK_THROWS(extract_features({}));
}

TEST_CASE("pairwise features match brute-force enumeration") {
  for (std::size_t n : {2, 7, 30}) {
    auto d = generate_dga_domains(default_family_catalog()[0], n);
    std::vector<std::string> names;
    for (const auto& x : d) names.push_back(strip_tld(x));
    auto [mean, mx] = pair_mean_max(names);
    auto f = extract_features(d);
    CHECK(f[2 * kFeatureStats + 0] == doctest::Approx(mean).epsilon(1e-12));
    CHECK(f[2 * kFeatureStats + 4] == doctest::Approx(mx).epsilon(1e-12));
  }
}

TEST_CASE("forest probabilities, persistence and errors") {
  TrainingCorpusSpec spec;
  spec.clusters_per_family = 8;
  spec.background_clusters = 8;
  spec.noisy_benign_clusters = 4;
  auto data = synthetic_training_clusters(spec);
  ForestParams p;
  p.trees = 20;
  auto model = train_detector(data, p, 3);
  CHECK(model.classes == std::vector<std::string>{"benign", "gimex", "murex", "pyksa", "suppa"});
  auto x = feature_matrix(data);
  for (std::size_t i = 0; i < x.size(); i += 5) {
    auto pr = model.predict_proba(x[i]);
    double sum = 0;
    for (double v : pr) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
  }

  auto back = ForestModel::from_json(model.to_json());
  for (std::size_t i = 0; i < x.size(); i += 3) CHECK(back.predict_proba(x[i]) == model.predict_proba(x[i]));
  CHECK(back.to_json() == model.to_json());

  CHECK_THROWS_AS(ForestModel::from_json("{\"format\": \"other\"}"), DataError);
  CHECK_THROWS_AS(static_cast<void>(model.predict_proba({1.0, 2.0})), std::invalid_argument);
  CHECK_THROWS_AS(train_forest({{1.0}, {2.0}}, {"a", "a"}, p, 1), std::invalid_argument);
  CHECK_THROWS_AS(train_forest({{1.0}, {2.0}, {3.0}}, {"a", "a", "b"}, p, 1), std::invalid_argument);

  const auto path = std::filesystem::temp_directory_path() / "graphadv-model-test.json";
  model.save(path);
  CHECK(ForestModel::load(path).to_json() == model.to_json());
  std::filesystem::remove(path);
}

TEST_CASE("training is deterministic") {
  TrainingCorpusSpec spec;
  spec.clusters_per_family = 5;
  spec.background_clusters = 5;
  spec.noisy_benign_clusters = 3;
  ForestParams p;
  p.trees = 10;
  CHECK(train_detector(synthetic_training_clusters(spec), p, 4).to_json() ==
        train_detector(synthetic_training_clusters(spec), p, 4).to_json());
}

TEST_CASE("separable toy data is learned exactly") {
  std::vector<std::vector<double>> x;
  std::vector<std::string> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({static_cast<double>(i), static_cast<double>(i % 3)});
    y.push_back(i < 20 ? "low" : "high");
  }
  auto m = train_forest(x, y, ForestParams{}, 9);
  CHECK(m.predict({3.0, 0.0}) == "low");
  CHECK(m.predict({35.0, 1.0}) == "high");
}

TEST_CASE("cluster scoring reports the planted family") {
  auto model = default_detector();
  auto fam = generate_dga_domains(default_family_catalog()[2], 30);
  std::vector<std::string> domains = fam;
  std::vector<int> labels(fam.size(), 0);
  std::map<std::string, std::string> truth;
  for (const auto& d : fam) truth[d] = "pyksa";
  auto c = Clustering::from_labels(domains, labels);
  auto scores = cluster_true_class_probability(model, c, truth, "pyksa");
  REQUIRE(scores.size() == 1);
  CHECK(scores[0].predicted == "pyksa");
  CHECK(scores[0].true_probability >= 0.9);
}

}  // TEST_SUITE
