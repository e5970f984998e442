#include <cmath>
#include <sstream>

#include "doctest.h"
#include "graphadv/defense.hpp"
#include "graphadv/errors.hpp"
#include "graphadv/rng.hpp"

using namespace graphadv;

namespace {

// ARI and Fowlkes-Mallows from explicit pair counts.
std::pair<double, double> pair_count_oracle(const std::vector<int>& p, const std::vector<int>& r) {
  double a = 0, b = 0, c = 0, d = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = i + 1; j < p.size(); ++j) {
      const bool sp = p[i] == p[j], sr = r[i] == r[j];
      if (sp && sr) ++a;
      else if (sp) ++b;
      else if (sr) ++c;
      else ++d;
    }
  const double ari = 2.0 * (a * d - b * c) / ((a + b) * (b + d) + (a + c) * (c + d));
  const double fm = a / std::sqrt((a + b) * (a + c));
  return {ari, fm};
}

std::vector<int> random_labels(Rng& rng, std::size_t n, std::uint64_t k) {
  std::vector<int> out(n);
  for (auto& x : out) x = static_cast<int>(rng.uniform(k));
  return out;
}

ForestModel small_model(std::uint64_t seed = 3) {
  TrainingCorpusSpec spec;
  spec.clusters_per_family = 8;
  spec.background_clusters = 8;
  spec.noisy_benign_clusters = 6;
  ForestParams p;
  p.trees = 15;
  return train_detector(synthetic_training_clusters(spec), p, seed);
}

}  // namespace

TEST_SUITE("defense") {

TEST_CASE("validity indices on trivial partitions") {
  const std::vector<int> ref{0, 0, 0, 1, 1, 1};
  auto same = validity_indices(ref, ref);
  for (double v : {same.ari, same.nmi, same.homogeneity, same.completeness, same.v_measure, same.fowlkes_mallows,
                   same.purity})
    CHECK(v == doctest::Approx(1.0));

  // Relabeling does not matter.
  auto swapped = validity_indices({1, 1, 1, 0, 0, 0}, ref);
  CHECK(swapped.ari == doctest::Approx(1.0));

  auto one = validity_indices({0, 0, 0, 0, 0, 0}, ref);
  CHECK(one.homogeneity == doctest::Approx(0.0));
  CHECK(one.completeness == doctest::Approx(1.0));
  CHECK(one.purity == doctest::Approx(0.5));
  CHECK(one.ari == doctest::Approx(0.0));
  CHECK(one.nmi == doctest::Approx(0.0));

  auto singletons = validity_indices({0, 1, 2, 3, 4, 5}, ref);
  CHECK(singletons.homogeneity == doctest::Approx(1.0));
  CHECK(singletons.purity == doctest::Approx(1.0));
  CHECK(singletons.fowlkes_mallows == doctest::Approx(0.0));

  CHECK_THROWS_AS(validity_indices({0, 1}, {0, 0}), DataError);
  CHECK_THROWS_AS(validity_indices({0, 1, 2}, {0, 1}), DataError);
}

TEST_CASE("ARI and Fowlkes-Mallows match pair counting") {
  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 5 + rng.uniform(40);
    auto r = random_labels(rng, n, 2 + rng.uniform(4));
    auto p = random_labels(rng, n, 1 + rng.uniform(6));
    if (std::count(r.begin(), r.end(), r[0]) == static_cast<long>(n)) r[0] = r[0] + 1;
    auto [ari, fm] = pair_count_oracle(p, r);
    auto v = validity_indices(p, r);
    CHECK(v.ari == doctest::Approx(ari).epsilon(1e-9));
    CHECK(v.fowlkes_mallows == doctest::Approx(fm).epsilon(1e-9));
    CHECK(v.v_measure == doctest::Approx(2 * v.homogeneity * v.completeness /
                                         std::max(v.homogeneity + v.completeness, 1e-300)).epsilon(1e-9));
  }
}

TEST_CASE("ARI of independent random clusterings averages near zero") {
  double sum = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(derive_seed(99, s));
    sum += validity_indices(random_labels(rng, 200, 5), random_labels(rng, 200, 4)).ari;
  }
  CHECK(std::abs(sum / 100) < 0.01);
}

TEST_CASE("validity on a clustering uses only labeled domains") {
  auto c = Clustering::from_labels({"a", "b", "c", "d", "x"}, {0, 0, 1, 1, 1});
  auto v = validity_indices(c, {{"a", "f"}, {"b", "f"}, {"c", "g"}, {"d", "g"}});
  CHECK(v.ari == doctest::Approx(1.0));
}

TEST_CASE("spearman correlation") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 35, 90}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman({1, 2, 2, 3}, {1, 2, 3, 4}) == doctest::Approx(4.5 / std::sqrt(22.5)));
  CHECK_THROWS(spearman({1}, {1}));
}

TEST_CASE("retraining") {
  const ForestModel m = small_model();
  CHECK(retrain_with_noise(m, {}, m.seed).to_json() == m.to_json());

  LabeledClusters adv;
  adv.clusters.push_back(generate_dga_domains(default_family_catalog()[0], 30));
  adv.labels.push_back("suppa");
  adv.clusters.push_back(generate_dga_domains(default_family_catalog()[3], 30));
  adv.labels.push_back("gimex");
  auto r = retrain_with_noise(m, adv, 5);
  CHECK(r.train_x.size() == m.train_x.size() + 2);
  CHECK(r.classes == m.classes);
  CHECK(r.params.trees == m.params.trees);

  auto fpr = family_false_positive_rates(m, synthetic_training_clusters(TrainingCorpusSpec{}));
  CHECK(fpr.size() == 4);
  CHECK(!fpr.count("benign"));
  for (const auto& [cls, rate] : fpr) {
    CHECK(rate >= 0.0);
    CHECK(rate <= 1.0);
  }

  auto e = evaluate_retraining(m, r, adv, adv);
  CHECK(e.correct_after >= 0.0);
  std::ostringstream os;
  write_fpr_table(os, e);
  CHECK(os.str().find("gimex") != std::string::npos);
}

TEST_CASE("sweep parameters") {
  DetectionConfig spectral;
  spectral.backend = Backend::spectral;
  CHECK(with_parameter(spectral, SweepParam::svd_rank, 9).svd_rank == 9);
  CHECK_THROWS_AS(with_parameter(spectral, SweepParam::walk_length, 9), UsageError);
  CHECK_THROWS_AS(with_parameter(spectral, SweepParam::svd_rank, 0), UsageError);
  DetectionConfig n2v;
  n2v.backend = Backend::node2vec;
  CHECK(with_parameter(n2v, SweepParam::walk_length, 7).node2vec.walk_length == 7);
  CHECK(with_parameter(n2v, SweepParam::neighborhood_size, 3).node2vec.context == 3);
  DetectionConfig community;
  community.backend = Backend::community;
  CHECK_THROWS_AS(with_parameter(community, SweepParam::svd_rank, 5), UsageError);
  for (auto p : {SweepParam::svd_rank, SweepParam::walk_length, SweepParam::neighborhood_size})
    CHECK(sweep_param_from_string(to_string(p)) == p);
  CHECK_THROWS_AS(sweep_param_from_string("depth"), UsageError);
}

TEST_CASE("a single-value sweep equals direct enumeration") {
  const Scenario sc = build_scenario(desk_scenario(1));
  const ForestModel m = small_model();
  DetectionConfig cfg;
  cfg.backend = Backend::spectral;
  const GridSpec grid{30, 5, 0.2};
  auto r = sweep_hyperparameter(sc, cfg, SweepParam::svd_rank, {8}, m, grid, 11);
  REQUIRE(r.rows.size() == 1);
  const auto resolved = with_parameter(cfg, SweepParam::svd_rank, 8);
  auto direct = enumerate_attack_surface(sc.graph, sc.attackers.front(), make_detector(resolved), forest_judge(m), grid, 11);
  std::ostringstream a, b;
  write_success_matrix_csv(a, r.rows[0].surface);
  write_success_matrix_csv(b, direct);
  CHECK(a.str() == b.str());
  CHECK(r.rows[0].attack_success_rate == direct.success_rate);
  CHECK(r.rows[0].quality.purity > 0.0);

  std::ostringstream csv;
  write_sweep_csv(csv, r);
  CHECK(csv.str().rfind("param,value,attack_success_rate,ari,nmi,homogeneity,completeness,fowlkes_mallows,purity,v_measure\n", 0) == 0);
  CHECK_THROWS_AS(sweep_hyperparameter(sc, cfg, SweepParam::svd_rank, {}, m, grid, 11), UsageError);
}

}  // TEST_SUITE
