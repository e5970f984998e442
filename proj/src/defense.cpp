#include "graphadv/defense.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>

#include "graphadv/errors.hpp"
#include "graphadv/features.hpp"

namespace graphadv {

namespace {

double choose2(double n) { return n * (n - 1) / 2; }

double entropy(const std::vector<double>& counts, double n) {
  double h = 0;
  for (double c : counts)
    if (c > 0) h -= (c / n) * std::log(c / n);
  return h;
}

std::vector<int> dense_ids(const std::vector<std::string>& labels) {
  std::map<std::string, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
  return out;
}

std::string predicted_label(const ForestModel& model, const std::vector<std::string>& cluster) {
  auto f = extract_features(cluster);
  return model.predict(std::vector<double>(f.begin(), f.end()));
}

}  // namespace

ValidityIndices validity_indices(const std::vector<int>& predicted, const std::vector<int>& reference) {
  if (predicted.size() != reference.size()) throw DataError("validity indices: label vectors differ in size");
  std::set<int> classes(reference.begin(), reference.end());
  if (classes.size() < 2) throw DataError("validity indices: reference needs at least two classes");

  // Contingency table over dense ids.
  std::map<int, int> kid, cid;
  for (int k : predicted) kid.emplace(k, static_cast<int>(kid.size()));
  for (int c : reference) cid.emplace(c, static_cast<int>(cid.size()));
  const std::size_t nk = kid.size(), nc = cid.size();
  std::vector<double> table(nk * nc, 0.0), a(nk, 0.0), b(nc, 0.0);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const int k = kid[predicted[i]], c = cid[reference[i]];
    table[k * nc + c] += 1;
    a[k] += 1;
    b[c] += 1;
  }
  const double n = static_cast<double>(predicted.size());

  ValidityIndices v;
  double sum_ij = 0, sum_a = 0, sum_b = 0;
  for (double x : table) sum_ij += choose2(x);
  for (double x : a) sum_a += choose2(x);
  for (double x : b) sum_b += choose2(x);
  const double expected = sum_a * sum_b / choose2(n);
  const double max_index = 0.5 * (sum_a + sum_b);
  v.ari = max_index == expected ? 1.0 : (sum_ij - expected) / (max_index - expected);
  v.fowlkes_mallows = sum_ij == 0 ? 0.0 : sum_ij / std::sqrt(sum_a * sum_b);

  const double h_c = entropy(b, n), h_k = entropy(a, n);
  double mi = 0;
  for (std::size_t k = 0; k < nk; ++k)
    for (std::size_t c = 0; c < nc; ++c) {
      const double x = table[k * nc + c];
      if (x > 0) mi += (x / n) * std::log(n * x / (a[k] * b[c]));
    }
  mi = std::max(mi, 0.0);
  // H(C|K) = H(C) − I and H(K|C) = H(K) − I.
  v.homogeneity = h_c == 0 ? 1.0 : mi / h_c;
  v.completeness = h_k == 0 ? 1.0 : mi / h_k;
  v.v_measure = v.homogeneity + v.completeness == 0
                    ? 0.0
                    : 2 * v.homogeneity * v.completeness / (v.homogeneity + v.completeness);
  v.nmi = h_c + h_k == 0 ? 1.0 : mi / (0.5 * (h_c + h_k));

  double majority = 0;
  for (std::size_t k = 0; k < nk; ++k)
    majority += *std::max_element(table.begin() + static_cast<std::ptrdiff_t>(k * nc),
                                  table.begin() + static_cast<std::ptrdiff_t>((k + 1) * nc));
  v.purity = majority / n;
  return v;
}

ValidityIndices validity_indices(const Clustering& c, const std::map<std::string, std::string>& reference) {
  std::vector<int> pred;
  std::vector<std::string> ref;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto it = reference.find(c.domains()[i]);
    if (it == reference.end()) continue;
    pred.push_back(c.assignment()[i]);
    ref.push_back(it->second);
  }
  return validity_indices(pred, dense_ids(ref));
}

std::vector<ScenarioSpec> family_scenarios(std::size_t count, std::uint64_t seed) {
  const auto catalog = default_family_catalog();
  std::vector<ScenarioSpec> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    ScenarioSpec spec = desk_scenario(s);
    spec.families[0].family = catalog[i % catalog.size()];
    spec.families[0].family.seed = derive_seed(spec.families[0].family.seed, s);
    out.push_back(std::move(spec));
  }
  return out;
}

LabeledClusters noise_attack_clusters(const std::vector<ScenarioSpec>& scenarios, const DetectionConfig& cfg,
                                      const ForestModel& model, int m, Knowledge knowledge, std::uint64_t seed,
                                      double min_target_share) {
  LabeledClusters out;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario scenario = build_scenario(scenarios[i]);
    // The defender's configuration is fixed on the clean graph, as in deployment.
    DetectionConfig resolved = cfg;
    resolved.seed = derive_seed(cfg.seed, i);
    if (resolved.backend == Backend::spectral && resolved.svd_rank <= 0)
      resolved.svd_rank = run_detection(scenario.graph, resolved, model).svd_rank;
    const Detector detect = make_detector(resolved);

    for (std::size_t a = 0; a < scenario.attackers.size(); ++a) {
      const auto& attacker = scenario.attackers[a];
      const std::uint64_t s = derive_seed(derive_seed(seed, i), a);
      auto source = make_noise_source(knowledge, scenarios[i], scenario, s);
      const NoiseInjection inj = inject_noise(scenario.graph, attacker, m, *source);
      const std::set<std::string> targets(attacker.graph.domains().begin(), attacker.graph.domains().end());
      for (auto& members : detect(inj.global).members()) {
        const auto hits = static_cast<double>(
            std::count_if(members.begin(), members.end(), [&](const std::string& d) { return targets.count(d) > 0; }));
        if (hits > 0 && hits >= min_target_share * static_cast<double>(members.size())) {
          out.clusters.push_back(std::move(members));
          out.labels.push_back(attacker.family);
        }
      }
    }
  }
  return out;
}

ForestModel retrain_with_noise(const ForestModel& model, const LabeledClusters& adversarial, std::uint64_t seed) {
  auto x = model.train_x;
  auto y = model.train_y;
  const auto extra = feature_matrix(adversarial);
  x.insert(x.end(), extra.begin(), extra.end());
  y.insert(y.end(), adversarial.labels.begin(), adversarial.labels.end());
  return train_forest(x, y, model.params, seed);
}

std::map<std::string, double> family_false_positive_rates(const ForestModel& model, const LabeledClusters& data) {
  std::vector<std::string> predicted;
  predicted.reserve(data.clusters.size());
  for (const auto& c : data.clusters) predicted.push_back(predicted_label(model, c));
  std::map<std::string, double> out;
  for (const auto& cls : model.classes) {
    if (cls == kBenignClass) continue;
    std::size_t negatives = 0, false_pos = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (data.labels[i] == cls) continue;
      ++negatives;
      false_pos += predicted[i] == cls;
    }
    out[cls] = negatives == 0 ? 0.0 : static_cast<double>(false_pos) / static_cast<double>(negatives);
  }
  return out;
}

RetrainEvaluation evaluate_retraining(const ForestModel& before, const ForestModel& after,
                                      const LabeledClusters& attacked, const LabeledClusters& holdout) {
  RetrainEvaluation e;
  if (!attacked.clusters.empty()) {
    std::size_t ok_before = 0, ok_after = 0;
    for (std::size_t i = 0; i < attacked.clusters.size(); ++i) {
      ok_before += predicted_label(before, attacked.clusters[i]) == attacked.labels[i];
      ok_after += predicted_label(after, attacked.clusters[i]) == attacked.labels[i];
    }
    const auto n = static_cast<double>(attacked.clusters.size());
    e.correct_before = static_cast<double>(ok_before) / n;
    e.correct_after = static_cast<double>(ok_after) / n;
  }
  e.fpr_before = family_false_positive_rates(before, holdout);
  e.fpr_after = family_false_positive_rates(after, holdout);
  return e;
}

void write_fpr_table(std::ostream& out, const RetrainEvaluation& e) {
  char line[96];
  std::snprintf(line, sizeof line, "%-12s %12s %12s\n", "Family", "FPR before", "FPR after");
  out << line;
  for (const auto& [family, before] : e.fpr_before) {
    auto it = e.fpr_after.find(family);
    const double after = it == e.fpr_after.end() ? 0.0 : it->second;
    std::snprintf(line, sizeof line, "%-12s %11.2f%% %11.2f%%\n", family.c_str(), 100 * before, 100 * after);
    out << line;
  }
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::svd_rank: return "svd-rank";
    case SweepParam::walk_length: return "walk-length";
    case SweepParam::neighborhood_size: return "neighborhood-size";
  }
  return "?";
}

SweepParam sweep_param_from_string(std::string_view s) {
  if (s == "svd-rank") return SweepParam::svd_rank;
  if (s == "walk-length") return SweepParam::walk_length;
  if (s == "neighborhood-size") return SweepParam::neighborhood_size;
  throw UsageError("unknown sweep parameter '" + std::string(s) + "'");
}

DetectionConfig with_parameter(DetectionConfig cfg, SweepParam param, int value) {
  if (value <= 0) throw UsageError("sweep values must be positive");
  const Backend needed = param == SweepParam::svd_rank ? Backend::spectral : Backend::node2vec;
  if (cfg.backend != needed)
    throw UsageError(std::string(to_string(param)) + " does not apply to the " + std::string(to_string(cfg.backend)) +
                     " backend");
  switch (param) {
    case SweepParam::svd_rank: cfg.svd_rank = value; break;
    case SweepParam::walk_length: cfg.node2vec.walk_length = value; break;
    case SweepParam::neighborhood_size: cfg.node2vec.context = value; break;
  }
  return cfg;
}

SweepResult sweep_hyperparameter(const Scenario& scenario, const DetectionConfig& base, SweepParam param,
                                 const std::vector<int>& values, const ForestModel& model, const GridSpec& grid,
                                 std::uint64_t seed, int threads) {
  if (values.empty()) throw UsageError("sweep needs at least one value");
  if (scenario.attackers.empty()) throw DataError("sweep: scenario has no attacker graph");
  for (int v : values) with_parameter(base, param, v);  // validate everything up front

  SweepResult r;
  r.param = param;
  const BipartiteGraph filtered = filter_singleton_hosts(scenario.graph);
  const ClusterJudge judge = forest_judge(model);
  for (int v : values) {
    const DetectionConfig cfg = with_parameter(base, param, v);
    SweepRow row;
    row.value = v;
    row.quality = validity_indices(cluster_domains(filtered, cfg), scenario.reference_labels);
    row.surface = enumerate_attack_surface(scenario.graph, scenario.attackers.front(), make_detector(cfg), judge, grid,
                                           seed, threads);
    row.attack_success_rate = row.surface.success_rate;
    r.rows.push_back(std::move(row));
  }
  return r;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "param,value,attack_success_rate,ari,nmi,homogeneity,completeness,fowlkes_mallows,purity,v_measure\n";
  for (const auto& row : r.rows) {
    const auto& q = row.quality;
    out << to_string(r.param) << ',' << row.value << ',' << row.attack_success_rate << ',' << q.ari << ',' << q.nmi
        << ',' << q.homogeneity << ',' << q.completeness << ',' << q.fowlkes_mallows << ',' << q.purity << ','
        << q.v_measure << '\n';
  }
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace graphadv
