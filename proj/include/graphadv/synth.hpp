#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "graphadv/corpus.hpp"
#include "graphadv/graph.hpp"
#include "graphadv/rng.hpp"

namespace graphadv {

enum class DgaStyle { random_chars, dictionary_words };

/// A synthetic, parameterized DGA family.
struct DgaFamilySpec {
  std::string name;
  std::string charset = "abcdefghijklmnopqrstuvwxyz";
  int min_length = 8;
  int max_length = 16;
  std::vector<std::string> tlds{"com"};
  std::uint64_t seed = 0;
  DgaStyle style = DgaStyle::random_chars;

  void validate() const;
};

/// `n` distinct domains of the family, a pure function of (spec, n).
std::vector<std::string> generate_dga_domains(const DgaFamilySpec& spec, std::size_t n,
                                              const WordCorpus& words = bundled_corpus());

/// Dictionary-word generator whose output is meant to be classified benign.
struct BenignDgaSpec {
  std::vector<std::string> tlds{"com", "net", "org", "info"};
  double punycode_fraction = 0.05;
  double www_fraction = 0.10;
  double number_dash_fraction = 0.30;
  // Relative weights of the three word sources when drawing a name part.
  double dictionary_weight = 0.6;
  double web_term_weight = 0.2;
  double domain_token_weight = 0.2;
  int min_parts = 2;
  int max_parts = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

class BenignDgaGenerator {
 public:
  BenignDgaGenerator(BenignDgaSpec spec, const WordCorpus& words = bundled_corpus());
  /// Next candidate name; may repeat earlier output.
  std::string next();

 private:
  const std::string& draw_word();

  BenignDgaSpec spec_;
  const WordCorpus* words_;
  Rng rng_;
};

/// `n` distinct benign-DGA names.
std::vector<std::string> generate_benign_dga(const BenignDgaSpec& spec, std::size_t n,
                                             const WordCorpus& words = bundled_corpus());

/// Heterogeneous benign NXDOMAIN traffic: browser probes, typos, word
/// names and internal host names.
class BackgroundDomainGenerator {
 public:
  explicit BackgroundDomainGenerator(std::uint64_t seed, const WordCorpus& words = bundled_corpus());
  std::string next();

 private:
  Rng rng_;
  const WordCorpus* words_;
};

bool is_valid_domain_name(std::string_view name);

/// Four families with pairwise disjoint charsets and distinct length ranges;
/// the first one is the desk scenario's planted family.
std::vector<DgaFamilySpec> default_family_catalog();

struct SharingModel {
  enum class Kind { all, subset, fraction };
  Kind kind = Kind::all;
  std::size_t subset_size = 0;  // hosts per domain, Kind::subset
  double fraction = 1.0;        // kept fraction of the complete block, Kind::fraction
};

struct PlantedFamilySpec {
  DgaFamilySpec family;
  std::size_t infected_hosts = 10;
  std::size_t domains = 60;
  SharingModel sharing;
  /// Draw infected hosts from the background hosts instead of fresh ids.
  bool overlap_background = false;
  /// Mean number of extra background-pool domains each infected host queries.
  double extra_background_mean = 0.0;
};

struct ScenarioSpec {
  std::uint64_t master_seed = 1;
  std::size_t background_hosts = 200;
  double background_degree_mean = 4.0;  // 1 + geometric
  std::size_t pool_domains = 600;
  double pool_zipf_exponent = 1.0;
  double private_fraction = 0.3;
  std::size_t benign_groups = 0;
  std::size_t group_hosts_min = 3;
  std::size_t group_hosts_max = 8;
  std::size_t group_domains_min = 5;
  std::size_t group_domains_max = 30;
  double group_density = 0.7;
  std::vector<PlantedFamilySpec> families;

  void validate() const;
};

struct Scenario {
  std::string id;
  BipartiteGraph graph;
  std::vector<AttackerSubgraph> attackers;
  /// Planted domain → family name.
  std::map<std::string, std::string> labels;
  /// Reference clusters for validity indices: planted families and benign groups.
  std::map<std::string, std::string> reference_labels;
  /// Background domains queried by exactly one host, in graph order.
  std::vector<std::string> tail_domains;
};

Scenario build_scenario(const ScenarioSpec& spec);

/// Smaller network from a different seed carrying the same attacker graphs.
/// Used as the moderate-knowledge attacker's surrogate.
Scenario build_surrogate(const ScenarioSpec& spec, const std::vector<AttackerSubgraph>& attackers,
                         double host_fraction, std::uint64_t seed);

/// Desk-scale defaults: 200 background hosts and one planted 10×60 family.
ScenarioSpec desk_scenario(std::uint64_t seed = 1);

}  // namespace graphadv
