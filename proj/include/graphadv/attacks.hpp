#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "graphadv/forest.hpp"
#include "graphadv/graph.hpp"
#include "graphadv/synth.hpp"

namespace graphadv {

// ---- Noise sources --------------------------------------------------------

enum class Knowledge { minimal, moderate, perfect };

std::string_view to_string(Knowledge k);
Knowledge knowledge_from_string(std::string_view s);

class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  /// Next candidate noisy domain, or nullopt once exhausted.
  virtual std::optional<std::string> next() = 0;
};

/// Minimal knowledge: names from the benign dictionary DGA.
class BenignDgaNoise : public NoiseSource {
 public:
  explicit BenignDgaNoise(std::uint64_t seed);
  std::optional<std::string> next() override;

 private:
  BenignDgaGenerator gen_;
};

/// A fixed list of domains handed out in seeded random order.
class DomainListNoise : public NoiseSource {
 public:
  DomainListNoise(std::vector<std::string> domains, std::uint64_t seed);
  std::optional<std::string> next() override;

 private:
  std::vector<std::string> domains_;
  std::size_t pos_ = 0;
};

/// Noise source for a knowledge level. Moderate draws the tail domains of a
/// surrogate network built from a different seed; perfect draws the tail
/// domains of the scenario itself.
std::unique_ptr<NoiseSource> make_noise_source(Knowledge k, const ScenarioSpec& spec, const Scenario& scenario,
                                               std::uint64_t seed);

// ---- Targeted noise injection ---------------------------------------------

struct NoiseInjection {
  BipartiteGraph global;
  AttackerSubgraph attacker;
  /// mirrors[i][v] = v′ for round i.
  std::vector<std::map<std::string, std::string>> mirrors;
  /// Injected (host, noisy domain) edges in insertion order.
  std::vector<std::pair<std::string, std::string>> injected;
};

/// m rounds of mirroring every attacker edge (u, v) to (u, v′) with fresh
/// noisy domains. Candidates that are attacker domains or already used are
/// re-drawn; throws DataError after `max_rejects` consecutive rejections or
/// when the source runs dry.
NoiseInjection inject_noise(const BipartiteGraph& global, const AttackerSubgraph& attacker, int m,
                            NoiseSource& source, int max_rejects = 1000);

/// The attacked global graph with the injected edges removed.
BipartiteGraph remove_injected(const NoiseInjection& n);

// ---- Small community ------------------------------------------------------

/// Completes the attacker graph, keeps |V|−n_v random domains and |U|−n_e
/// random hosts for each kept domain.
AttackerSubgraph small_community(const AttackerSubgraph& attacker, std::size_t n_v, std::size_t n_e,
                                 std::uint64_t seed);

/// Global graph with the attacker's edges replaced by those of `attacked`.
/// Nodes left without edges are dropped.
BipartiteGraph substitute_attacker(const BipartiteGraph& global, const AttackerSubgraph& original,
                                   const AttackerSubgraph& attacked);

// ---- Success --------------------------------------------------------------

struct ClusterVerdict {
  std::string predicted;
  double true_probability = 0.0;
};

/// Classifies one cluster; `family` is the class whose probability is reported.
using ClusterJudge = std::function<ClusterVerdict(const std::vector<std::string>& domains, const std::string& family)>;

ClusterJudge forest_judge(const ForestModel& model);

struct TargetCluster {
  int cluster = 0;
  std::size_t size = 0;
  std::size_t targets = 0;
  std::string predicted;
  double true_probability = 0.0;
};

/// Every cluster with at least one of the target domains, judged.
std::vector<TargetCluster> judge_target_clusters(const Clustering& c, const std::vector<std::string>& targets,
                                                 const std::string& family, const ClusterJudge& judge);

struct NoiseVerdict {
  bool success = false;
  double median_before = 0.0;
  double median_after = 0.0;
  double median_drop = 0.0;
};

/// Succeeds iff no post-attack target cluster is predicted as the family.
NoiseVerdict noise_attack_success(const std::vector<TargetCluster>& before, const std::vector<TargetCluster>& after,
                                  const std::string& family);

/// Largest cluster in which the target family makes up less than
/// `max_target_share` of the domains.
std::optional<int> find_death_star(const Clustering& c, const std::vector<std::string>& targets,
                                   double max_target_share = 0.2);

struct SmallCommunityVerdict {
  bool success = false;
  /// Every target domain that was clustered joined the death star.
  bool death_star = false;
  double max_true_probability = 0.0;
  std::size_t filtered_targets = 0;
};

/// Succeeds iff every target domain is in the death star, in a cluster not
/// predicted as the family, or was filtered out before clustering.
SmallCommunityVerdict small_community_success(const Clustering& after, const std::vector<std::string>& targets,
                                              const std::string& family, const ClusterJudge& judge,
                                              std::optional<int> death_star);

// ---- Attack surface -------------------------------------------------------

/// Clusters the domains of a (possibly attacked) global graph.
using Detector = std::function<Clustering(const BipartiteGraph& global)>;

struct GridSpec {
  std::size_t domain_stride = 1;
  std::size_t host_stride = 1;
  double death_star_share = 0.2;
};

struct SurfaceCell {
  std::size_t kept_domains = 0;
  std::size_t kept_hosts = 0;
  bool success = false;
  bool death_star = false;
  double max_true_prob = 0.0;
  double density = 0.0;
};

struct AttackSurface {
  std::vector<SurfaceCell> cells;
  std::size_t successes = 0;
  double success_rate = 0.0;
  bool strided = false;
  GridSpec grid;
  /// Smallest agility cost among successful cells.
  std::optional<double> min_success_cost;
};

/// Kept counts 1, 1+s, 1+2s, ... for each axis; the full count is always included.
std::vector<std::size_t> grid_axis(std::size_t full, std::size_t stride);

/// Runs small_community, re-detection and success evaluation for every grid
/// cell. Cell (i) uses seed derive_seed(seed, i). Rate is successes/(|U||V|)
/// for the full grid and successes/cells otherwise. `threads` > 1 evaluates
/// cells concurrently; results do not depend on it.
AttackSurface enumerate_attack_surface(const BipartiteGraph& global, const AttackerSubgraph& attacker,
                                       const Detector& detect, const ClusterJudge& judge, const GridSpec& grid,
                                       std::uint64_t seed, int threads = 1);

void write_success_matrix_csv(std::ostream& out, const AttackSurface& s);

// ---- Costs ----------------------------------------------------------------

struct AnomalyRow {
  std::string host;
  double before = 0.0;
  double after = 0.0;
};

struct AnomalyBand {
  std::size_t hosts = 0;
  double share = 0.0;          // of infected hosts
  double mean_before = 0.0;
  double mean_after = 0.0;
};

struct AnomalyCost {
  std::vector<AnomalyRow> rows;
  AnomalyBand below;  // < 95th percentile before the attack
  AnomalyBand above;  // >= 95th percentile
};

AnomalyCost anomaly_cost(const BipartiteGraph& before, const BipartiteGraph& after,
                         const std::vector<std::string>& infected);

/// Two-band table with one line per attack variant.
void write_anomaly_table(std::ostream& out, const std::vector<std::pair<std::string, AnomalyCost>>& variants);
void write_anomaly_csv(std::ostream& out, const std::vector<std::pair<std::string, AnomalyCost>>& variants);

/// max(D(G) − D_rel(G′), 0) with G′ measured against G's dimensions.
double agility_cost(const AttackerSubgraph& original, const BipartiteGraph& attacked);

// ---- Report ---------------------------------------------------------------

struct AttackReport {
  static constexpr int kSchemaVersion = 1;
  std::string attack;  // "noise" or "smallcom"
  std::map<std::string, std::string> config;
  bool success = false;
  std::vector<TargetCluster> before;
  std::vector<TargetCluster> after;
  std::optional<AnomalyCost> anomaly;
  double agility_cost = 0.0;
  std::optional<AttackSurface> surface;

  [[nodiscard]] std::string to_json() const;
};

}  // namespace graphadv
