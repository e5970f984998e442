#include <sstream>

#include "doctest.h"
#include "graphadv/errors.hpp"
#include "graphadv/graph.hpp"
#include "graphadv/rng.hpp"
#include "toys.hpp"

using namespace graphadv;

TEST_SUITE("graph") {

TEST_CASE("density of complete and edgeless graphs") {
  BipartiteGraph g;
  for (auto h : {"a", "b"})
    for (auto d : {"x", "y", "z"}) g.add_edge(h, d);
  CHECK(density(g) == 1.0);

  BipartiteGraph e;
  e.add_host("a");
  e.add_host("b");
  for (auto d : {"x", "y", "z"}) e.add_domain(d);
  CHECK(density(e) == 0.0);
  CHECK_THROWS_AS(density(BipartiteGraph{}), DataError);
}

TEST_CASE("running toy has density one half") {
  BipartiteGraph g = toys::four_by_three();
  CHECK(g.num_hosts() == 4);
  CHECK(g.num_domains() == 3);
  CHECK(density(g) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("density_relative uses the original dimensions") {
  BipartiteGraph g;
  for (auto d : {"w", "x", "y", "z"}) g.add_edge("a", d);
  CHECK(density_relative(g, 2, 4) == 0.5);
  CHECK(density_relative(complete(g), 1, 4) == 1.0);
  CHECK_THROWS_AS(density_relative(g, 0, 4), DataError);
}

TEST_CASE("complete is idempotent and has |U||V| edges") {
  BipartiteGraph g;
  g.add_edge("a", "x");
  g.add_edge("b", "y");
  g.add_domain("z");
  auto c = complete(g);
  CHECK(c.num_edges() == 6);
  CHECK(complete(c) == c);
  CHECK(density_relative(c, g.num_hosts(), g.num_domains()) == 1.0);

  BipartiteGraph big;
  for (int h = 0; h < 10; ++h) big.add_host("h" + std::to_string(h));
  for (int d = 0; d < 618; ++d) big.add_domain("d" + std::to_string(d));
  big.add_edge("h0", "d0");
  CHECK(complete(big).num_edges() == 6180);
}

TEST_CASE("density matches a brute-force count on random graphs") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto nu = 1 + rng.uniform(50), nv = 1 + rng.uniform(50);
    BipartiteGraph g;
    std::size_t edges = 0;
    for (std::size_t h = 0; h < nu; ++h) g.add_host("h" + std::to_string(h));
    for (std::size_t d = 0; d < nv; ++d) g.add_domain("d" + std::to_string(d));
    for (std::size_t h = 0; h < nu; ++h)
      for (std::size_t d = 0; d < nv; ++d)
        if (rng.bernoulli(0.3)) edges += g.add_edge("h" + std::to_string(h), "d" + std::to_string(d));
    const double dens = density(g);
    CHECK(dens == doctest::Approx(static_cast<double>(edges) / static_cast<double>(nu * nv)));
    CHECK(dens >= 0.0);
    CHECK(dens <= 1.0);
  }
}

TEST_CASE("degree percentiles use the inclusive CDF") {
  BipartiteGraph flat;
  for (auto h : {"a", "b", "c"}) flat.add_edge(h, std::string("d") + h);
  CHECK(host_degree_percentiles(flat, {"a"}).at("a") == 100.0);

  BipartiteGraph g;  // degrees 1, 2, 3, 4
  for (int h = 1; h <= 4; ++h)
    for (int d = 0; d < h; ++d) g.add_edge("h" + std::to_string(h), "d" + std::to_string(d));
  // Oracle: fraction of hosts whose degree is <= 2.
  CHECK(host_degree_percentiles(g, {"h2"}).at("h2") == 50.0);
  CHECK_THROWS_AS(host_degree_percentiles(g, {"nobody"}), DataError);
}

TEST_CASE("adding edges to a host never lowers its percentile") {
  Rng rng(5);
  BipartiteGraph g;
  for (int h = 0; h < 40; ++h)
    for (std::uint64_t k = 0, n = 1 + rng.uniform(8); k < n; ++k)
      g.add_edge("h" + std::to_string(h), "d" + std::to_string(rng.uniform(30)));
  double last = host_degree_percentiles(g, {"h0"}).at("h0");
  for (int k = 0; k < 20; ++k) {
    g.add_edge("h0", "extra" + std::to_string(k));
    const double p = host_degree_percentiles(g, {"h0"}).at("h0");
    CHECK(p >= last);
    last = p;
  }
}

TEST_CASE("host filtering") {
  BipartiteGraph singles;
  for (auto h : {"a", "b"}) singles.add_edge(h, "x");
  CHECK(filter_singleton_hosts(singles).empty());

  BipartiteGraph g;
  g.add_edge("a", "x");
  for (auto h : {"b", "c"}) {
    g.add_edge(h, "y");
    g.add_edge(h, "z");
  }
  auto f = filter_singleton_hosts(g);
  CHECK(f.hosts() == std::vector<std::string>{"b", "c"});
  CHECK_FALSE(f.has_domain("x"));
  CHECK(filter_singleton_hosts(f) == f);
  CHECK(f.num_edges() <= g.num_edges());
}

TEST_CASE("edge list round trip and malformed lines") {
  BipartiteGraph g = toys::four_by_three();
  std::stringstream ss;
  write_edge_list(ss, g);
  CHECK(read_edge_list(ss) == g);

  std::istringstream bad("# comment\nh1\td1\nh2 d2 extra\n");
  CHECK_THROWS_AS(read_edge_list(bad), DataError);
}

TEST_CASE("clustering indices are contiguous in order of first appearance") {
  auto c = Clustering::from_labels({"a", "b", "c", "d"}, {7, 3, 7, 9});
  CHECK(c.assignment() == std::vector<int>{0, 1, 0, 2});
  CHECK(c.num_clusters() == 3);
  CHECK(c.cluster_of("d") == 2);
  CHECK_FALSE(c.cluster_of("zz").has_value());
}

}  // TEST_SUITE
