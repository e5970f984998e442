#include "graphadv/pipeline.hpp"

#include <fstream>

#include "graphadv/community.hpp"
#include "graphadv/errors.hpp"
#include "graphadv/features.hpp"
#include "graphadv/spectral.hpp"
#include "json.hpp"

namespace graphadv {

std::map<std::string, std::string> DetectionConfig::hyperparameters() const {
  std::map<std::string, std::string> hp{{"backend", std::string(to_string(backend))}, {"seed", std::to_string(seed)}};
  switch (backend) {
    case Backend::community: break;
    case Backend::spectral:
      hp["svd-rank"] = svd_rank > 0 ? std::to_string(svd_rank) : "scree";
      hp["scree-values"] = std::to_string(scree_values);
      hp["scree-threshold"] = std::to_string(scree_threshold);
      break;
    case Backend::node2vec:
      hp["dimensions"] = std::to_string(node2vec.dimensions);
      hp["walk-length"] = std::to_string(node2vec.walk_length);
      hp["walks-per-node"] = std::to_string(node2vec.walks_per_node);
      hp["neighborhood-size"] = std::to_string(node2vec.context);
      hp["epochs"] = std::to_string(node2vec.epochs);
      hp["negatives"] = std::to_string(node2vec.negatives);
      break;
  }
  if (backend != Backend::community) {
    hp["xmeans-k-min"] = std::to_string(xmeans.k_min);
    hp["xmeans-k-max"] = std::to_string(xmeans.k_max);
  }
  return hp;
}

ScreeChoice select_rank(const BipartiteGraph& filtered, const DetectionConfig& cfg) {
  auto sv = singular_values(filtered, cfg.scree_values, derive_seed(cfg.seed, "scree"));
  if (sv.size() < 3) return {std::max<int>(1, static_cast<int>(sv.size())), false};
  return scree_select_rank(sv, cfg.scree_threshold);
}

Clustering cluster_domains(const BipartiteGraph& filtered, const DetectionConfig& cfg) {
  if (filtered.num_domains() == 0) return Clustering::from_labels({}, {}, cfg.backend, cfg.hyperparameters());
  Clustering c;
  switch (cfg.backend) {
    case Backend::community:
      c = domain_clusters_of(filtered, louvain(filtered, derive_seed(cfg.seed, "louvain")));
      break;
    case Backend::spectral: {
      if (cfg.svd_rank <= 0) throw std::logic_error("cluster_domains: spectral rank not resolved");
      Embedding e = spectral_embed(filtered, cfg.svd_rank, derive_seed(cfg.seed, "svd"));
      c = xmeans_cluster(e, Backend::spectral, cfg.xmeans, derive_seed(cfg.seed, "xmeans"));
      break;
    }
    case Backend::node2vec: {
      Embedding e = node2vec_embed(filtered, cfg.node2vec, derive_seed(cfg.seed, "node2vec"));
      c = xmeans_cluster(e, Backend::node2vec, cfg.xmeans, derive_seed(cfg.seed, "xmeans"));
      break;
    }
  }
  c.hyperparameters = cfg.hyperparameters();
  return c;
}

Detection run_detection(const BipartiteGraph& global, DetectionConfig cfg, const ForestModel& model) {
  Detection d;
  d.filtered = filter_singleton_hosts(global);
  if (cfg.backend == Backend::spectral && cfg.svd_rank <= 0 && d.filtered.num_domains() > 0) {
    d.scree = singular_values(d.filtered, cfg.scree_values, derive_seed(cfg.seed, "scree"));
    ScreeChoice choice = d.scree.size() >= 3 ? scree_select_rank(d.scree, cfg.scree_threshold)
                                             : ScreeChoice{std::max<int>(1, static_cast<int>(d.scree.size())), false};
    cfg.svd_rank = choice.rank;
    d.rank_plateaued = choice.plateaued;
  }
  d.svd_rank = cfg.svd_rank;
  try {
    d.clustering = cluster_domains(d.filtered, cfg);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(to_string(cfg.backend)) + " backend failed: " + e.what());
  }
  const auto members = d.clustering.members();
  for (std::size_t k = 0; k < members.size(); ++k) {
    auto f = extract_features(members[k]);
    ClusterPrediction p;
    p.cluster = static_cast<int>(k);
    p.size = members[k].size();
    p.probabilities = model.predict_proba(std::vector<double>(f.begin(), f.end()));
    p.predicted = model.classes[std::max_element(p.probabilities.begin(), p.probabilities.end()) -
                                p.probabilities.begin()];
    d.predictions.push_back(std::move(p));
  }
  return d;
}

Detector make_detector(const DetectionConfig& resolved) {
  return [resolved](const BipartiteGraph& global) { return cluster_domains(filter_singleton_hosts(global), resolved); };
}

std::string_view to_string(AttackSpec::Kind k) {
  switch (k) {
    case AttackSpec::Kind::identity: return "identity";
    case AttackSpec::Kind::noise: return "noise";
    case AttackSpec::Kind::smallcom: return "smallcom";
  }
  return "?";
}

AttackSpec::Kind attack_kind_from_string(std::string_view s) {
  if (s == "identity") return AttackSpec::Kind::identity;
  if (s == "noise") return AttackSpec::Kind::noise;
  if (s == "smallcom") return AttackSpec::Kind::smallcom;
  throw UsageError("unknown attack '" + std::string(s) + "'");
}

AttackExperiment run_attack_experiment(const ScenarioSpec& spec, const Scenario& scenario, const DetectionConfig& cfg,
                                       const ForestModel& model, const AttackSpec& attack, std::uint64_t seed) {
  if (attack.attacker >= scenario.attackers.size())
    throw DataError("scenario has no attacker graph #" + std::to_string(attack.attacker));
  const AttackerSubgraph& attacker = scenario.attackers[attack.attacker];
  const auto& targets = attacker.graph.domains();

  AttackExperiment x;
  x.baseline = run_detection(scenario.graph, cfg, model);
  x.resolved = cfg;
  x.resolved.svd_rank = x.baseline.svd_rank;
  const Detector detect = make_detector(x.resolved);
  const ClusterJudge judge = forest_judge(model);

  AttackReport& r = x.report;
  r.attack = std::string(to_string(attack.kind));
  r.config = x.resolved.hyperparameters();
  r.config["family"] = attacker.family;
  r.config["seed"] = std::to_string(seed);
  r.before = judge_target_clusters(x.baseline.clustering, targets, attacker.family, judge);

  switch (attack.kind) {
    case AttackSpec::Kind::identity: {
      x.after = detect(scenario.graph);
      r.after = judge_target_clusters(*x.after, targets, attacker.family, judge);
      r.success = noise_attack_success(r.before, r.after, attacker.family).success;
      break;
    }
    case AttackSpec::Kind::noise: {
      r.config["m"] = std::to_string(attack.m);
      r.config["knowledge"] = std::string(to_string(attack.knowledge));
      const auto& infected = attacker.graph.hosts();
      // Every variant draws from a fresh source with the same seed, so
      // variant k's noise is a prefix of variant k+1's.
      for (int k = 1; k <= attack.m; ++k) {
        auto source = make_noise_source(attack.knowledge, spec, scenario, derive_seed(seed, "noise"));
        NoiseInjection inj = inject_noise(scenario.graph, attacker, k, *source);
        x.anomaly_variants.emplace_back("Variant " + std::to_string(k),
                                        anomaly_cost(scenario.graph, inj.global, infected));
        if (k < attack.m) continue;
        x.after = detect(inj.global);
        r.after = judge_target_clusters(*x.after, targets, attacker.family, judge);
        r.success = noise_attack_success(r.before, r.after, attacker.family).success;
        r.anomaly = x.anomaly_variants.back().second;
        // Mirroring only adds edges, so the density cost is zero.
        r.agility_cost = 0.0;
      }
      break;
    }
    case AttackSpec::Kind::smallcom: {
      r.config["death-star-share"] = std::to_string(attack.grid_spec.death_star_share);
      if (attack.grid) {
        r.config["domain-stride"] = std::to_string(attack.grid_spec.domain_stride);
        r.config["host-stride"] = std::to_string(attack.grid_spec.host_stride);
        r.surface = enumerate_attack_surface(scenario.graph, attacker, detect, judge, attack.grid_spec,
                                             derive_seed(seed, "grid"), attack.threads);
        r.success = r.surface->successes > 0;
        r.agility_cost = r.surface->min_success_cost.value_or(0.0);
      } else {
        r.config["n_v"] = std::to_string(attack.n_v);
        r.config["n_e"] = std::to_string(attack.n_e);
        AttackerSubgraph a = small_community(attacker, attack.n_v, attack.n_e, derive_seed(seed, "smallcom"));
        x.after = detect(substitute_attacker(scenario.graph, attacker, a));
        const auto& kept = a.graph.domains();
        r.after = judge_target_clusters(*x.after, kept, attacker.family, judge);
        auto ds = find_death_star(*x.after, kept, attack.grid_spec.death_star_share);
        r.success = small_community_success(*x.after, kept, attacker.family, judge, ds).success;
        r.agility_cost = agility_cost(attacker, a.graph);
      }
      break;
    }
  }
  return x;
}

void write_clusters_json(const std::filesystem::path& path, const Clustering& c) {
  nlohmann::json j;
  j["format"] = "graphadv-clusters";
  j["version"] = 1;
  j["backend"] = std::string(to_string(c.backend));
  j["hyperparameters"] = c.hyperparameters;
  auto clusters = nlohmann::json::array();
  for (const auto& m : c.members()) clusters.push_back(m);
  j["clusters"] = clusters;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void write_predictions_csv(const std::filesystem::path& path, const Detection& d, const ForestModel& model) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "cluster,size,predicted";
  for (const auto& c : model.classes) out << ",p_" << c;
  out << '\n';
  for (const auto& p : d.predictions) {
    out << p.cluster << ',' << p.size << ',' << p.predicted;
    for (double v : p.probabilities) out << ',' << v;
    out << '\n';
  }
}

}  // namespace graphadv
