#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "graphadv/attacks.hpp"
#include "graphadv/errors.hpp"
#include "toys.hpp"

using namespace graphadv;

namespace {

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// Toy attacker plus five background hosts that all query bg1 and bg2.
BipartiteGraph toy_global() {
  BipartiteGraph g = toys::four_by_three();
  for (int i = 0; i < 5; ++i) {
    g.add_edge("b" + std::to_string(i), "bg1");
    g.add_edge("b" + std::to_string(i), "bg2");
  }
  return g;
}

// Drops domains queried by a single host, clusters the rest by degree.
Clustering degree_detector(const BipartiteGraph& g) {
  std::vector<std::string> domains;
  std::vector<int> labels;
  for (NodeIndex d = 0; d < g.num_domains(); ++d) {
    if (g.domain_degree(d) < 2) continue;
    domains.push_back(g.domain(d));
    labels.push_back(static_cast<int>(g.domain_degree(d)));
  }
  return Clustering::from_labels(domains, labels);
}

// A cluster is the family once it holds two of its "v" names.
ClusterVerdict name_judge(const std::vector<std::string>& domains, const std::string& family) {
  int hits = 0;
  for (const auto& d : domains) hits += d[0] == 'v';
  return hits >= 2 ? ClusterVerdict{family, 0.9} : ClusterVerdict{"benign", 0.1};
}

}  // namespace

TEST_SUITE("attacks") {

TEST_CASE("noise injection mirrors every attacker edge m times") {
  const auto toy = toys::attacker_of(toys::four_by_three());
  const BipartiteGraph global = toy_global();
  for (int m : {1, 2, 3}) {
    DomainListNoise src(numbered("n", 40), 5);
    auto n = inject_noise(global, toy, m, src);
    CHECK(n.global.num_edges() == global.num_edges() + static_cast<std::size_t>(m) * toy.graph.num_edges());
    CHECK(n.attacker.graph.num_edges() == static_cast<std::size_t>(m + 1) * toy.graph.num_edges());
    CHECK(n.global.num_hosts() == global.num_hosts());
    REQUIRE(n.mirrors.size() == static_cast<std::size_t>(m));
    std::set<std::string> fresh;
    for (const auto& mirror : n.mirrors) {
      CHECK(mirror.size() == toy.graph.num_domains());
      for (const auto& [v, vp] : mirror) {
        CHECK(vp[0] == 'n');
        CHECK(fresh.insert(vp).second);
        auto vi = toy.graph.domain_index(v);
        auto vpi = n.global.domain_index(vp);
        // v' has exactly v's hosts.
        std::set<std::string> a, b;
        for (NodeIndex h : toy.graph.domain_neighbors(*vi)) a.insert(toy.graph.host(h));
        for (NodeIndex h : n.global.domain_neighbors(*vpi)) b.insert(n.global.host(h));
        CHECK(a == b);
      }
    }
    CHECK(remove_injected(n).num_edges() == global.num_edges());
    CHECK(is_subgraph_of(global, n.global));
  }
}

TEST_CASE("noise injection rejects collisions and fails on exhaustion") {
  const auto toy = toys::attacker_of(toys::four_by_three());
  DomainListNoise colliding({"v1", "v2", "v3", "x1", "x2", "x3"}, 1);
  auto n = inject_noise(toy.graph, toy, 1, colliding);
  for (const auto& [v, vp] : n.mirrors[0]) CHECK(vp[0] == 'x');

  DomainListNoise small(numbered("n", 4), 1);
  CHECK_THROWS_AS(inject_noise(toy.graph, toy, 2, small), DataError);
  DomainListNoise any(numbered("n", 4), 1);
  CHECK_THROWS_AS(inject_noise(toy.graph, toy, 0, any), UsageError);
  DomainListNoise same({"v1", "v1", "v1", "v1"}, 1);
  CHECK_THROWS_AS(inject_noise(toy.graph, toy, 1, same, 3), DataError);
}

TEST_CASE("small community keeps a sub-block of the completed graph") {
  const auto toy = toys::attacker_of(toys::four_by_three());
  const BipartiteGraph full = complete(toy.graph);
  for (std::size_t nv = 0; nv < 3; ++nv)
    for (std::size_t ne = 0; ne < 4; ++ne)
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto a = small_community(toy, nv, ne, seed);
        CHECK(a.graph.num_domains() == 3 - nv);
        CHECK(a.graph.num_edges() == (3 - nv) * (4 - ne));
        CHECK(a.graph.num_hosts() <= 4);
        CHECK(a.graph.num_hosts() >= 4 - ne);
        CHECK(is_subgraph_of(a.graph, full));
        CHECK(a.family == toy.family);
        for (NodeIndex d = 0; d < a.graph.num_domains(); ++d) CHECK(a.graph.domain_degree(d) == 4 - ne);
        CHECK(a.graph == small_community(toy, nv, ne, seed).graph);
      }
  CHECK_THROWS_AS(small_community(toy, 3, 0, 1), UsageError);
  CHECK_THROWS_AS(small_community(toy, 0, 4, 1), UsageError);
}

TEST_CASE("agility cost on the running toy") {
  const auto toy = toys::attacker_of(toys::four_by_three());
  auto a = small_community(toy, 1, 2, 3);
  CHECK(density_relative(a.graph, 4, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(agility_cost(toy, a.graph) == doctest::Approx(1.0 / 6.0));
  CHECK(agility_cost(toy, small_community(toy, 2, 1, 3).graph) == doctest::Approx(0.25));
  // A denser variant costs nothing.
  CHECK(agility_cost(toy, small_community(toy, 0, 0, 3).graph) == 0.0);
}

TEST_CASE("substitution replaces only attacker edges") {
  const auto toy = toys::attacker_of(toys::four_by_three());
  auto a = small_community(toy, 2, 3, 1);
  auto g = substitute_attacker(toy_global(), toy, a);
  CHECK(g.num_edges() == 10 + 1);
  CHECK(g.has_edge("b0", "bg1"));
  CHECK(g.num_domains() == 3);
}

TEST_CASE("death star and success rules") {
  // Cluster 0: two targets of three. Cluster 1: one target among ten.
  std::vector<std::string> domains{"t1", "t2", "x1", "t3"};
  std::vector<int> labels{0, 0, 0, 1};
  for (int i = 0; i < 9; ++i) {
    domains.push_back("y" + std::to_string(i));
    labels.push_back(1);
  }
  auto c = Clustering::from_labels(domains, labels);
  const std::vector<std::string> targets{"t1", "t2", "t3", "t4"};
  auto ds = find_death_star(c, targets);
  REQUIRE(ds);
  CHECK(*ds == 1);
  CHECK(!find_death_star(c, targets, 0.05));

  auto judge_all = [](const std::vector<std::string>&, const std::string& f) { return ClusterVerdict{f, 0.8}; };
  auto judge_none = [](const std::vector<std::string>&, const std::string&) { return ClusterVerdict{"benign", 0.3}; };
  auto v = small_community_success(c, targets, "fam", judge_all, ds);
  CHECK(!v.success);
  CHECK(!v.death_star);
  CHECK(v.filtered_targets == 1);
  CHECK(v.max_true_probability == 0.8);
  CHECK(small_community_success(c, targets, "fam", judge_none, ds).success);

  // Every clustered target in the death star; the rest filtered.
  auto s = small_community_success(c, {"t3", "t9"}, "fam", judge_all, ds);
  CHECK(s.success);
  CHECK(s.death_star);

  std::vector<TargetCluster> before{{0, 10, 10, "fam", 0.9}, {1, 10, 5, "fam", 0.7}};
  std::vector<TargetCluster> after{{0, 30, 15, "benign", 0.2}};
  auto nv = noise_attack_success(before, after, "fam");
  CHECK(nv.success);
  CHECK(nv.median_before == doctest::Approx(0.8));
  CHECK(nv.median_drop == doctest::Approx(0.6));
  after.push_back({1, 3, 1, "fam", 0.6});
  CHECK(!noise_attack_success(before, after, "fam").success);
}

TEST_CASE("grid enumeration matches a brute-force oracle") {
  const auto toy = toys::attacker_of(toys::four_by_three(), "fam");
  const BipartiteGraph global = toy_global();
  // Under the degree detector targets escape when a single domain is kept
  // (no family cluster) or a single host is kept (filtered out).
  auto oracle = [](std::size_t kd, std::size_t kh) { return kd == 1 || kh == 1; };

  auto s = enumerate_attack_surface(global, toy, degree_detector, name_judge, GridSpec{}, 42);
  REQUIRE(s.cells.size() == 12);
  std::size_t expected = 0;
  double best_density = 0;
  for (const auto& c : s.cells) {
    CHECK(c.success == oracle(c.kept_domains, c.kept_hosts));
    CHECK(c.density == doctest::Approx(static_cast<double>(c.kept_domains * c.kept_hosts) / 12.0));
    if (oracle(c.kept_domains, c.kept_hosts)) {
      ++expected;
      best_density = std::max(best_density, c.density);
    }
  }
  CHECK(s.successes == expected);
  CHECK(s.success_rate == doctest::Approx(6.0 / 12.0));
  CHECK(!s.strided);
  REQUIRE(s.min_success_cost);
  CHECK(*s.min_success_cost == doctest::Approx(0.5 - best_density));
  CHECK(*s.min_success_cost == doctest::Approx(1.0 / 6.0));

  auto threaded = enumerate_attack_surface(global, toy, degree_detector, name_judge, GridSpec{}, 42, 3);
  std::ostringstream a, b;
  write_success_matrix_csv(a, s);
  write_success_matrix_csv(b, threaded);
  CHECK(a.str() == b.str());

  GridSpec strided{2, 3, 0.2};
  auto st = enumerate_attack_surface(global, toy, degree_detector, name_judge, strided, 42);
  CHECK(st.strided);
  CHECK(grid_axis(3, 2) == std::vector<std::size_t>{1, 3});
  CHECK(grid_axis(4, 3) == std::vector<std::size_t>{1, 4});
  REQUIRE(st.cells.size() == 4);
  std::size_t hits = 0;
  for (const auto& c : st.cells) hits += oracle(c.kept_domains, c.kept_hosts);
  CHECK(st.success_rate == doctest::Approx(static_cast<double>(hits) / 4.0));
}

TEST_CASE("anomaly cost splits infected hosts at the 95th percentile") {
  // Host hK queries d1..dK, so degrees run 1..20.
  BipartiteGraph before;
  for (int k = 1; k <= 20; ++k)
    for (int j = 1; j <= k; ++j) before.add_edge("h" + std::to_string(k), "d" + std::to_string(j));
  BipartiteGraph after = before;
  for (int j = 0; j < 10; ++j) after.add_edge("h1", "n" + std::to_string(j));

  auto cost = anomaly_cost(before, after, {"h1", "h20"});
  REQUIRE(cost.rows.size() == 2);
  CHECK(cost.rows[0].before == doctest::Approx(5.0));
  CHECK(cost.rows[0].after == doctest::Approx(55.0));
  CHECK(cost.below.hosts == 1);
  CHECK(cost.below.share == 0.5);
  CHECK(cost.below.mean_after == doctest::Approx(55.0));
  CHECK(cost.above.hosts == 1);
  CHECK(cost.above.mean_before == doctest::Approx(100.0));
  CHECK(cost.above.mean_after == doctest::Approx(100.0));

  std::ostringstream table, csv;
  write_anomaly_table(table, {{"Variant 1", cost}});
  write_anomaly_csv(csv, {{"Variant 1", cost}});
  CHECK(table.str().find("< 95th Percentile, 50.00% of hosts") != std::string::npos);
  CHECK(table.str().find("55.00%") != std::string::npos);
  CHECK(csv.str().find("below_95,0.5,Variant 1,5,55") != std::string::npos);
}

TEST_CASE("knowledge names round trip") {
  for (auto k : {Knowledge::minimal, Knowledge::moderate, Knowledge::perfect})
    CHECK(knowledge_from_string(to_string(k)) == k);
  CHECK_THROWS(knowledge_from_string("total"));
}

}  // TEST_SUITE
