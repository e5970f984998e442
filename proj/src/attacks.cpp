#include "graphadv/attacks.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "graphadv/errors.hpp"
#include "graphadv/features.hpp"
#include "graphadv/rng.hpp"
#include "json.hpp"

namespace graphadv {

std::string_view to_string(Knowledge k) {
  switch (k) {
    case Knowledge::minimal: return "minimal";
    case Knowledge::moderate: return "moderate";
    case Knowledge::perfect: return "perfect";
  }
  return "minimal";
}

Knowledge knowledge_from_string(std::string_view s) {
  if (s == "minimal") return Knowledge::minimal;
  if (s == "moderate") return Knowledge::moderate;
  if (s == "perfect") return Knowledge::perfect;
  throw UsageError("unknown knowledge level '" + std::string(s) + "'");
}

BenignDgaNoise::BenignDgaNoise(std::uint64_t seed) : gen_([seed] {
  BenignDgaSpec s;
  s.seed = seed;
  return s;
}()) {}

std::optional<std::string> BenignDgaNoise::next() { return gen_.next(); }

DomainListNoise::DomainListNoise(std::vector<std::string> domains, std::uint64_t seed) : domains_(std::move(domains)) {
  Rng rng(derive_seed(seed, "domain-list-noise"));
  rng.shuffle(domains_.begin(), domains_.end());
}

std::optional<std::string> DomainListNoise::next() {
  if (pos_ >= domains_.size()) return std::nullopt;
  return domains_[pos_++];
}

std::unique_ptr<NoiseSource> make_noise_source(Knowledge k, const ScenarioSpec& spec, const Scenario& scenario,
                                               std::uint64_t seed) {
  switch (k) {
    case Knowledge::minimal: return std::make_unique<BenignDgaNoise>(derive_seed(seed, "benign-dga"));
    case Knowledge::moderate: {
      Scenario sur = build_surrogate(spec, scenario.attackers, 0.5, derive_seed(seed, "surrogate"));
      return std::make_unique<DomainListNoise>(sur.tail_domains, seed);
    }
    case Knowledge::perfect: return std::make_unique<DomainListNoise>(scenario.tail_domains, seed);
  }
  throw UsageError("unknown knowledge level");
}

NoiseInjection inject_noise(const BipartiteGraph& global, const AttackerSubgraph& attacker, int m,
                            NoiseSource& source, int max_rejects) {
  if (m < 1) throw UsageError("noise multiplier m must be >= 1");
  const auto& ag = attacker.graph;
  NoiseInjection out;
  out.global = global;
  out.attacker = attacker;
  std::unordered_set<std::string> used(ag.domains().begin(), ag.domains().end());
  for (int round = 0; round < m; ++round) {
    std::map<std::string, std::string> mirror;
    for (const auto& v : ag.domains()) {
      int rejects = 0;
      for (;;) {
        auto cand = source.next();
        if (!cand) throw DataError("noise source exhausted after " + std::to_string(used.size() - ag.num_domains()) +
                                   " domains");
        if (used.insert(*cand).second) {
          mirror[v] = *cand;
          break;
        }
        if (++rejects >= max_rejects) throw DataError("noise source keeps colliding with existing domains");
      }
    }
    for (const Edge& e : ag.edges()) {
      const std::string& u = ag.host(e.host);
      const std::string& vp = mirror[ag.domain(e.domain)];
      out.global.add_edge(u, vp);
      out.attacker.graph.add_edge(u, vp);
      out.injected.emplace_back(u, vp);
    }
    out.mirrors.push_back(std::move(mirror));
  }
  return out;
}

BipartiteGraph remove_injected(const NoiseInjection& n) {
  std::unordered_set<std::uint64_t> drop;
  for (const auto& [u, v] : n.injected) {
    auto h = n.global.host_index(u);
    auto d = n.global.domain_index(v);
    drop.insert(static_cast<std::uint64_t>(*h) << 32 | *d);
  }
  return filter_edges(n.global, [&](const Edge& e) {
    return !drop.count(static_cast<std::uint64_t>(e.host) << 32 | e.domain);
  });
}

AttackerSubgraph small_community(const AttackerSubgraph& attacker, std::size_t n_v, std::size_t n_e,
                                 std::uint64_t seed) {
  const auto& g = attacker.graph;
  const std::size_t nu = g.num_hosts(), nv = g.num_domains();
  if (nu == 0 || nv == 0) throw DataError("degenerate graph");
  if (n_v >= nv) throw UsageError("n_v must be below the number of attacker domains");
  if (n_e >= nu) throw UsageError("n_e must be below the number of attacker hosts");
  Rng rng(derive_seed(seed, "small-community"));

  auto choose = [&](std::size_t n, std::size_t k) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) std::swap(idx[i], idx[i + rng.uniform(n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
  };

  // Every (host, domain) pair is an edge of the completed graph, so choosing
  // hosts per kept domain is choosing edges of the completion.
  auto kept_domains = choose(nv, nv - n_v);
  std::vector<std::vector<std::size_t>> kept_hosts;
  std::vector<char> host_used(nu, 0);
  for (std::size_t i = 0; i < kept_domains.size(); ++i) {
    kept_hosts.push_back(choose(nu, nu - n_e));
    for (std::size_t h : kept_hosts.back()) host_used[h] = 1;
  }
  AttackerSubgraph out;
  out.parent_id = attacker.parent_id;
  out.family = attacker.family;
  for (std::size_t h = 0; h < nu; ++h)
    if (host_used[h]) out.graph.add_host(g.host(static_cast<NodeIndex>(h)));
  for (std::size_t d : kept_domains) out.graph.add_domain(g.domain(static_cast<NodeIndex>(d)));
  for (std::size_t i = 0; i < kept_domains.size(); ++i)
    for (std::size_t h : kept_hosts[i])
      out.graph.add_edge(g.host(static_cast<NodeIndex>(h)), g.domain(static_cast<NodeIndex>(kept_domains[i])));
  return out;
}

BipartiteGraph substitute_attacker(const BipartiteGraph& global, const AttackerSubgraph& original,
                                   const AttackerSubgraph& attacked) {
  const auto& og = original.graph;
  BipartiteGraph out = filter_edges(global, [&](const Edge& e) {
    auto h = og.host_index(global.host(e.host));
    auto d = og.domain_index(global.domain(e.domain));
    return !(h && d && og.has_edge(*h, *d));
  });
  for (const Edge& e : attacked.graph.edges()) out.add_edge(attacked.graph.host(e.host), attacked.graph.domain(e.domain));
  return out;
}

ClusterJudge forest_judge(const ForestModel& model) {
  return [&model](const std::vector<std::string>& domains, const std::string& family) {
    auto f = extract_features(domains);
    auto p = model.predict_proba(std::vector<double>(f.begin(), f.end()));
    ClusterVerdict v;
    v.predicted = model.classes[std::max_element(p.begin(), p.end()) - p.begin()];
    int ci = model.class_index(family);
    v.true_probability = ci < 0 ? 0.0 : p[ci];
    return v;
  };
}

namespace {

std::vector<std::size_t> target_counts(const Clustering& c, const std::vector<std::string>& targets) {
  std::vector<std::size_t> count(static_cast<std::size_t>(c.num_clusters()), 0);
  for (const auto& t : targets)
    if (auto k = c.cluster_of(t)) ++count[*k];
  return count;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

std::vector<TargetCluster> judge_target_clusters(const Clustering& c, const std::vector<std::string>& targets,
                                                 const std::string& family, const ClusterJudge& judge) {
  std::vector<TargetCluster> out;
  const auto counts = target_counts(c, targets);
  const auto members = c.members();
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (counts[k] == 0) continue;
    auto v = judge(members[k], family);
    out.push_back({static_cast<int>(k), members[k].size(), counts[k], v.predicted, v.true_probability});
  }
  return out;
}

NoiseVerdict noise_attack_success(const std::vector<TargetCluster>& before, const std::vector<TargetCluster>& after,
                                  const std::string& family) {
  NoiseVerdict v;
  std::vector<double> pb, pa;
  for (const auto& t : before) pb.push_back(t.true_probability);
  for (const auto& t : after) pa.push_back(t.true_probability);
  v.median_before = median(pb);
  v.median_after = median(pa);
  v.median_drop = v.median_before - v.median_after;
  v.success = std::none_of(after.begin(), after.end(), [&](const TargetCluster& t) { return t.predicted == family; });
  return v;
}

std::optional<int> find_death_star(const Clustering& c, const std::vector<std::string>& targets,
                                   double max_target_share) {
  const auto counts = target_counts(c, targets);
  std::vector<std::size_t> sizes(counts.size(), 0);
  for (int a : c.assignment()) ++sizes[static_cast<std::size_t>(a)];
  std::optional<int> best;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (static_cast<double>(counts[k]) >= max_target_share * static_cast<double>(sizes[k])) continue;
    if (!best || sizes[k] > sizes[static_cast<std::size_t>(*best)]) best = static_cast<int>(k);
  }
  return best;
}

SmallCommunityVerdict small_community_success(const Clustering& after, const std::vector<std::string>& targets,
                                              const std::string& family, const ClusterJudge& judge,
                                              std::optional<int> death_star) {
  SmallCommunityVerdict v;
  v.success = true;
  v.death_star = true;
  std::size_t clustered = 0;
  for (const auto& t : targets) {
    auto k = after.cluster_of(t);
    if (!k) ++v.filtered_targets;
    else {
      ++clustered;
      if (!death_star || *k != *death_star) v.death_star = false;
    }
  }
  if (clustered == 0) v.death_star = false;
  for (const auto& tc : judge_target_clusters(after, targets, family, judge)) {
    v.max_true_probability = std::max(v.max_true_probability, tc.true_probability);
    if (death_star && tc.cluster == *death_star) continue;
    if (tc.predicted == family) v.success = false;
  }
  return v;
}

std::vector<std::size_t> grid_axis(std::size_t full, std::size_t stride) {
  std::vector<std::size_t> out;
  stride = std::max<std::size_t>(stride, 1);
  for (std::size_t k = 1; k <= full; k += stride) out.push_back(k);
  if (!out.empty() && out.back() != full) out.push_back(full);
  return out;
}

AttackSurface enumerate_attack_surface(const BipartiteGraph& global, const AttackerSubgraph& attacker,
                                       const Detector& detect, const ClusterJudge& judge, const GridSpec& grid,
                                       std::uint64_t seed, int threads) {
  const std::size_t nu = attacker.graph.num_hosts(), nv = attacker.graph.num_domains();
  const auto dom_axis = grid_axis(nv, grid.domain_stride);
  const auto host_axis = grid_axis(nu, grid.host_stride);
  AttackSurface s;
  s.grid = grid;
  s.strided = dom_axis.size() != nv || host_axis.size() != nu;
  for (std::size_t kd : dom_axis)
    for (std::size_t kh : host_axis) s.cells.push_back({kd, kh, false, false, 0.0, 0.0});

  auto run_cell = [&](std::size_t i) {
    SurfaceCell& cell = s.cells[i];
    AttackerSubgraph a = small_community(attacker, nv - cell.kept_domains, nu - cell.kept_hosts, derive_seed(seed, i));
    BipartiteGraph g = substitute_attacker(global, attacker, a);
    Clustering c = detect(g);
    const auto& targets = a.graph.domains();
    auto ds = find_death_star(c, targets, grid.death_star_share);
    auto v = small_community_success(c, targets, attacker.family, judge, ds);
    cell.success = v.success;
    cell.death_star = v.death_star;
    cell.max_true_prob = v.max_true_probability;
    cell.density = density_relative(a.graph, nu, nv);
  };
  threads = std::max(threads, 1);
  if (threads == 1) {
    for (std::size_t i = 0; i < s.cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = static_cast<std::size_t>(t); i < s.cells.size(); i += static_cast<std::size_t>(threads))
          run_cell(i);
      });
    for (auto& th : pool) th.join();
  }
  const double d0 = density(attacker.graph);
  for (const auto& c : s.cells) {
    if (!c.success) continue;
    ++s.successes;
    const double cost = std::max(d0 - c.density, 0.0);
    if (!s.min_success_cost || cost < *s.min_success_cost) s.min_success_cost = cost;
  }
  const double denom = s.strided ? static_cast<double>(s.cells.size()) : static_cast<double>(nu * nv);
  s.success_rate = denom > 0 ? static_cast<double>(s.successes) / denom : 0.0;
  return s;
}

void write_success_matrix_csv(std::ostream& out, const AttackSurface& s) {
  out << "kept_domains,kept_hosts,success,death_star,max_true_prob,density\n";
  for (const auto& c : s.cells)
    out << c.kept_domains << ',' << c.kept_hosts << ',' << c.success << ',' << c.death_star << ','
        << c.max_true_prob << ',' << c.density << '\n';
}

AnomalyCost anomaly_cost(const BipartiteGraph& before, const BipartiteGraph& after,
                         const std::vector<std::string>& infected) {
  AnomalyCost cost;
  auto pb = host_degree_percentiles(before, infected);
  auto pa = host_degree_percentiles(after, infected);
  for (const auto& h : infected) {
    AnomalyRow r{h, pb.at(h), pa.at(h)};
    AnomalyBand& band = r.before < 95.0 ? cost.below : cost.above;
    ++band.hosts;
    band.mean_before += r.before;
    band.mean_after += r.after;
    cost.rows.push_back(r);
  }
  for (AnomalyBand* b : {&cost.below, &cost.above}) {
    if (b->hosts) {
      b->mean_before /= static_cast<double>(b->hosts);
      b->mean_after /= static_cast<double>(b->hosts);
    }
    b->share = infected.empty() ? 0.0 : static_cast<double>(b->hosts) / static_cast<double>(infected.size());
  }
  return cost;
}

void write_anomaly_table(std::ostream& out, const std::vector<std::pair<std::string, AnomalyCost>>& variants) {
  if (variants.empty()) return;
  auto pct = [](double x) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << x << '%';
    return os.str();
  };
  auto band = [&](const char* title, const AnomalyBand& head, auto pick) {
    out << "Before Attack: " << title << ", " << pct(100.0 * head.share) << " of hosts\n";
    out << std::left << std::setw(20) << "Average Increase" << std::right << std::setw(16) << "From Percentile"
        << std::setw(16) << "To Percentile" << '\n';
    for (const auto& [name, cost] : variants) {
      const AnomalyBand& b = pick(cost);
      out << std::left << std::setw(20) << name << std::right << std::setw(16) << pct(b.mean_before) << std::setw(16)
          << pct(b.mean_after) << '\n';
    }
  };
  band("< 95th Percentile", variants.front().second.below, [](const AnomalyCost& c) -> const AnomalyBand& { return c.below; });
  out << '\n';
  band(">= 95th Percentile", variants.front().second.above, [](const AnomalyCost& c) -> const AnomalyBand& { return c.above; });
}

void write_anomaly_csv(std::ostream& out, const std::vector<std::pair<std::string, AnomalyCost>>& variants) {
  out << "band,hosts_share,variant,from_percentile,to_percentile\n";
  for (const char* name : {"below_95", "above_95"})
    for (const auto& [variant, cost] : variants) {
      const AnomalyBand& b = std::string(name) == "below_95" ? cost.below : cost.above;
      out << name << ',' << b.share << ',' << variant << ',' << b.mean_before << ',' << b.mean_after << '\n';
    }
}

double agility_cost(const AttackerSubgraph& original, const BipartiteGraph& attacked) {
  const double before = density(original.graph);
  const double after = density_relative(attacked, original.graph.num_hosts(), original.graph.num_domains());
  return std::max(before - after, 0.0);
}

namespace {

nlohmann::json clusters_json(const std::vector<TargetCluster>& v) {
  auto a = nlohmann::json::array();
  for (const auto& t : v)
    a.push_back({{"cluster", t.cluster},
                 {"size", t.size},
                 {"targets", t.targets},
                 {"predicted", t.predicted},
                 {"true_probability", t.true_probability}});
  return a;
}

nlohmann::json band_json(const AnomalyBand& b) {
  return {{"hosts", b.hosts}, {"share", b.share}, {"mean_before", b.mean_before}, {"mean_after", b.mean_after}};
}

}  // namespace

std::string AttackReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "graphadv-attack-report";
  j["version"] = kSchemaVersion;
  j["attack"] = attack;
  j["config"] = config;
  j["success"] = success;
  j["before"] = clusters_json(before);
  j["after"] = clusters_json(after);
  j["agility_cost"] = agility_cost;
  if (anomaly) {
    auto rows = nlohmann::json::array();
    for (const auto& r : anomaly->rows) rows.push_back({{"host", r.host}, {"before", r.before}, {"after", r.after}});
    j["anomaly"] = {{"rows", rows}, {"below_95", band_json(anomaly->below)}, {"above_95", band_json(anomaly->above)}};
  }
  if (surface) {
    j["surface"] = {{"success_rate", surface->success_rate},
                    {"successes", surface->successes},
                    {"cells", surface->cells.size()},
                    {"strided", surface->strided},
                    {"domain_stride", surface->grid.domain_stride},
                    {"host_stride", surface->grid.host_stride},
                    {"death_star_share", surface->grid.death_star_share}};
    if (surface->min_success_cost) j["surface"]["min_success_cost"] = *surface->min_success_cost;
  }
  return j.dump(2);
}

}  // namespace graphadv
