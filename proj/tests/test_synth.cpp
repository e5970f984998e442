#include <algorithm>
#include <set>
#include <sstream>

#include "doctest.h"
#include "graphadv/errors.hpp"
#include "graphadv/scenario_file.hpp"
#include "graphadv/synth.hpp"

using namespace graphadv;

namespace {

DgaFamilySpec hex16(std::uint64_t seed) {
  return {"hexy", "0123456789abcdef", 16, 16, {"org"}, seed, DgaStyle::random_chars};
}

std::string label_of(const std::string& d) { return d.substr(0, d.find('.')); }

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("family domains respect charset, length and tld") {
  auto v = generate_dga_domains(hex16(1), 3);
  REQUIRE(v.size() == 3);
  for (const auto& d : v) {
    const auto l = label_of(d);
    CHECK(l.size() == 16);
    CHECK(l.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(d.substr(d.find('.')) == ".org");
    CHECK(is_valid_domain_name(d));
  }
}

TEST_CASE("family domains are deterministic and seed-sensitive") {
  CHECK(generate_dga_domains(hex16(1), 50) == generate_dga_domains(hex16(1), 50));
  auto a = generate_dga_domains(hex16(1), 1000), b = generate_dga_domains(hex16(2), 1000);
  std::set<std::string> sa(a.begin(), a.end());
  CHECK(sa.size() == 1000);
  const auto shared = std::count_if(b.begin(), b.end(), [&](const std::string& d) { return sa.count(d) > 0; });
  CHECK(shared < 10);
}

TEST_CASE("family spec validation and exhaustion") {
  DgaFamilySpec tiny{"tiny", "ab", 4, 4, {"com"}, 1, DgaStyle::random_chars};
  CHECK_THROWS_AS(generate_dga_domains(tiny, 17), DataError);  // only 16 names exist
  CHECK(generate_dga_domains(tiny, 16).size() == 16);
  DgaFamilySpec bad = tiny;
  bad.max_length = 64;
  CHECK_THROWS_AS(bad.validate(), DataError);
  bad = tiny;
  bad.tlds.clear();
  CHECK_THROWS_AS(bad.validate(), DataError);
}

TEST_CASE("dictionary-word families use their charset") {
  DgaFamilySpec words{"wordy", "abcdefghijklmnopqrstuvwxyz", 8, 20, {"net"}, 4, DgaStyle::dictionary_words};
  for (const auto& d : generate_dga_domains(words, 100)) {
    const auto l = label_of(d);
    CHECK(l.size() >= 8);
    CHECK(l.size() <= 20);
  }
}

TEST_CASE("benign DGA fractions") {
  BenignDgaSpec spec;
  spec.seed = 9;
  spec.punycode_fraction = 0;
  for (const auto& d : generate_benign_dga(spec, 2000)) CHECK(d.rfind("xn--", 0) == std::string::npos);

  spec.www_fraction = 1;
  for (const auto& d : generate_benign_dga(spec, 500)) CHECK(d.rfind("www.", 0) == 0);

  BenignDgaSpec p;
  p.seed = 10;
  p.punycode_fraction = 0.05;
  p.www_fraction = 0;
  BenignDgaGenerator gen(p);
  int puny = 0;
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) puny += gen.next().rfind("xn--", 0) == 0;
  CHECK(static_cast<double>(puny) / draws == doctest::Approx(0.05).epsilon(0.4));  // within ±2 points
}

TEST_CASE("benign DGA reaches the full noise budget") {
  BenignDgaSpec spec;
  spec.seed = 11;
  auto v = generate_benign_dga(spec, 59730);
  CHECK(v.size() == 59730);
  CHECK(std::set<std::string>(v.begin(), v.end()).size() == 59730);
  for (std::size_t i = 0; i < v.size(); i += 97) CHECK(is_valid_domain_name(v[i]));
  BenignDgaSpec three = spec;
  three.tlds.pop_back();
  CHECK_THROWS_AS(three.validate(), DataError);
}

TEST_CASE("catalog families have disjoint charsets") {
  auto cat = default_family_catalog();
  REQUIRE(cat.size() == 4);
  for (std::size_t i = 0; i < cat.size(); ++i)
    for (std::size_t j = i + 1; j < cat.size(); ++j)
      CHECK(cat[i].charset.find_first_of(cat[j].charset) == std::string::npos);
}

TEST_CASE("planted block without background") {
  ScenarioSpec spec;
  spec.background_hosts = 0;
  PlantedFamilySpec pf;
  pf.family = default_family_catalog()[0];
  pf.infected_hosts = 10;
  pf.domains = 618;
  spec.families.push_back(pf);
  Scenario s = build_scenario(spec);
  REQUIRE(s.attackers.size() == 1);
  CHECK(s.graph == s.attackers[0].graph);
  CHECK(density(s.graph) == 1.0);
  CHECK(s.labels.size() == 618);

  spec.families[0].sharing = {SharingModel::Kind::fraction, 0, 0.48};
  Scenario thin = build_scenario(spec);
  CHECK(density(thin.attackers[0].graph) == doctest::Approx(0.48).epsilon(1e-3));
}

TEST_CASE("scenario invariants") {
  ScenarioSpec spec = desk_scenario(3);
  Scenario a = build_scenario(spec), b = build_scenario(spec);
  std::ostringstream ea, eb;
  write_edge_list(ea, a.graph);
  write_edge_list(eb, b.graph);
  CHECK(ea.str() == eb.str());

  const auto& att = a.attackers.at(0);
  CHECK(is_subgraph_of(att.graph, a.graph));
  std::set<std::string> planted(att.graph.domains().begin(), att.graph.domains().end());
  std::set<std::string> labeled;
  for (const auto& [d, f] : a.labels) {
    labeled.insert(d);
    CHECK(f == att.family);
  }
  CHECK(planted == labeled);
  for (const auto& d : a.graph.domains()) CHECK(is_valid_domain_name(d));
  // Overlapped infections reuse background hosts.
  for (const auto& h : att.graph.hosts()) CHECK(h.rfind("h", 0) == 0);
}

TEST_CASE("disjoint infections use fresh host ids") {
  ScenarioSpec spec = desk_scenario(4);
  spec.families[0].overlap_background = false;
  spec.families[0].extra_background_mean = 0;
  Scenario s = build_scenario(spec);
  for (const auto& h : s.attackers[0].graph.hosts()) {
    CHECK(h.rfind("inf", 0) == 0);
    CHECK(s.graph.host_degree(*s.graph.host_index(h)) == 60);
  }
}

TEST_CASE("surrogate carries the attacker graph") {
  ScenarioSpec spec = desk_scenario(2);
  Scenario s = build_scenario(spec);
  Scenario sur = build_surrogate(spec, s.attackers, 0.5, 77);
  CHECK(is_subgraph_of(s.attackers[0].graph, sur.graph));
  CHECK(sur.graph.num_hosts() < s.graph.num_hosts());
  CHECK_FALSE(sur.tail_domains.empty());
}

TEST_CASE("scenario file round trip") {
  ScenarioSpec spec = desk_scenario(5);
  spec.families[0].sharing = {SharingModel::Kind::subset, 3, 1.0};
  const std::string text = format_scenario(spec);
  std::istringstream in(text);
  ScenarioSpec back = parse_scenario(in);
  CHECK(format_scenario(back) == text);
  CHECK(scenario_hash(back) == scenario_hash(spec));
  CHECK(scenario_hash(desk_scenario(6)) != scenario_hash(spec));

  std::istringstream unknown("master_seed = 1\nbogus = 2\n");
  CHECK_THROWS_AS(parse_scenario(unknown), DataError);
  std::istringstream bad_value("[family]\nname = x\ninfected_hosts = many\n");
  CHECK_THROWS_AS(parse_scenario(bad_value), DataError);
}

}  // TEST_SUITE
