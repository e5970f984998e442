#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace graphadv {

using NodeIndex = std::uint32_t;

struct Edge {
  NodeIndex host;
  NodeIndex domain;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected, unweighted bipartite graph of hosts (U) and the domains (V)
/// they queried. Hosts and domains are interned strings kept in insertion
/// order, so iteration and serialization are deterministic. Edges are unique.
class BipartiteGraph {
 public:
  NodeIndex add_host(std::string_view host);
  NodeIndex add_domain(std::string_view domain);
  /// Adds both endpoints if needed. Returns false if the edge already existed.
  bool add_edge(std::string_view host, std::string_view domain);
  bool add_edge(NodeIndex host, NodeIndex domain);

  [[nodiscard]] std::size_t num_hosts() const { return hosts_.size(); }
  [[nodiscard]] std::size_t num_domains() const { return domains_.size(); }
  [[nodiscard]] std::size_t num_edges() const { return edges_.size(); }
  [[nodiscard]] bool empty() const { return hosts_.empty() && domains_.empty(); }

  [[nodiscard]] const std::vector<std::string>& hosts() const { return hosts_; }
  [[nodiscard]] const std::vector<std::string>& domains() const { return domains_; }
  [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
  [[nodiscard]] const std::string& host(NodeIndex i) const { return hosts_[i]; }
  [[nodiscard]] const std::string& domain(NodeIndex i) const { return domains_[i]; }

  [[nodiscard]] std::optional<NodeIndex> host_index(std::string_view host) const;
  [[nodiscard]] std::optional<NodeIndex> domain_index(std::string_view domain) const;
  [[nodiscard]] bool has_host(std::string_view host) const { return host_index(host).has_value(); }
  [[nodiscard]] bool has_domain(std::string_view d) const { return domain_index(d).has_value(); }
  [[nodiscard]] bool has_edge(NodeIndex host, NodeIndex domain) const;
  [[nodiscard]] bool has_edge(std::string_view host, std::string_view domain) const;

  [[nodiscard]] const std::vector<NodeIndex>& host_neighbors(NodeIndex h) const { return host_adj_[h]; }
  [[nodiscard]] const std::vector<NodeIndex>& domain_neighbors(NodeIndex d) const { return domain_adj_[d]; }
  [[nodiscard]] std::size_t host_degree(NodeIndex h) const { return host_adj_[h].size(); }
  [[nodiscard]] std::size_t domain_degree(NodeIndex d) const { return domain_adj_[d].size(); }

  friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
    return a.hosts_ == b.hosts_ && a.domains_ == b.domains_ && a.edges_ == b.edges_;
  }

 private:
  static std::uint64_t edge_key(NodeIndex h, NodeIndex d) {
    return (static_cast<std::uint64_t>(h) << 32) | d;
  }

  std::vector<std::string> hosts_;
  std::vector<std::string> domains_;
  std::unordered_map<std::string, NodeIndex> host_lookup_;
  std::unordered_map<std::string, NodeIndex> domain_lookup_;
  std::vector<std::vector<NodeIndex>> host_adj_;
  std::vector<std::vector<NodeIndex>> domain_adj_;
  std::vector<Edge> edges_;
  std::unordered_set<std::uint64_t> edge_set_;
};

/// The attacker's part G of the defender's graph: infected hosts and the
/// malicious domains they query.
struct AttackerSubgraph {
  BipartiteGraph graph;
  std::string parent_id;
  std::string family;
};

enum class Backend { community, spectral, node2vec };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

/// Partition of a set of domains into clusters 0..k-1.
class Clustering {
 public:
  Clustering() = default;
  /// Reindexes raw labels contiguously in order of first appearance.
  static Clustering from_labels(std::vector<std::string> domains, const std::vector<int>& raw_labels,
                                Backend backend = Backend::spectral,
                                std::map<std::string, std::string> hyperparameters = {});

  [[nodiscard]] const std::vector<std::string>& domains() const { return domains_; }
  [[nodiscard]] const std::vector<int>& assignment() const { return assignment_; }
  [[nodiscard]] int num_clusters() const { return num_clusters_; }
  [[nodiscard]] std::size_t size() const { return domains_.size(); }
  [[nodiscard]] std::optional<int> cluster_of(std::string_view domain) const;
  /// Domains of each cluster, in clustering order.
  [[nodiscard]] std::vector<std::vector<std::string>> members() const;

  Backend backend = Backend::spectral;
  std::map<std::string, std::string> hyperparameters;

 private:
  std::vector<std::string> domains_;
  std::vector<int> assignment_;
  std::unordered_map<std::string, int> lookup_;
  int num_clusters_ = 0;
};

/// |E| / (|U|·|V|).
double density(const BipartiteGraph& g);
/// |E'| normalized by the original attacker dimensions.
double density_relative(const BipartiteGraph& attacked, std::size_t original_hosts,
                        std::size_t original_domains);
/// Same hosts and domains, every host connected to every domain.
BipartiteGraph complete(const BipartiteGraph& g);

/// Percentile (0..100) of each target host in the "≤" empirical CDF of
/// distinct-domain degrees over all hosts.
std::map<std::string, double> host_degree_percentiles(const BipartiteGraph& g,
                                                      const std::vector<std::string>& targets);

/// Drops hosts of degree ≤ 1 and any domain left without edges.
BipartiteGraph filter_singleton_hosts(const BipartiteGraph& g);

/// New graph keeping only the edges for which keep(edge) holds; nodes that
/// end up isolated are dropped unless they were isolated already.
template <class Pred>
BipartiteGraph filter_edges(const BipartiteGraph& g, Pred keep) {
  BipartiteGraph out;
  std::vector<char> host_used(g.num_hosts(), 0), domain_used(g.num_domains(), 0);
  std::vector<char> kept(g.num_edges(), 0);
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    if (keep(e)) {
      kept[i] = 1;
      host_used[e.host] = 1;
      domain_used[e.domain] = 1;
    }
  }
  for (NodeIndex h = 0; h < g.num_hosts(); ++h)
    if (host_used[h] || g.host_degree(h) == 0) out.add_host(g.host(h));
  for (NodeIndex d = 0; d < g.num_domains(); ++d)
    if (domain_used[d] || g.domain_degree(d) == 0) out.add_domain(g.domain(d));
  for (std::size_t i = 0; i < g.edges().size(); ++i)
    if (kept[i]) out.add_edge(g.host(g.edges()[i].host), g.domain(g.edges()[i].domain));
  return out;
}

/// Whether every host, domain and edge of `child` is present in `parent`.
bool is_subgraph_of(const BipartiteGraph& child, const BipartiteGraph& parent);

// Edge-list text format: `host<TAB>domain` per line, '#' comments.
BipartiteGraph read_edge_list(std::istream& in);
BipartiteGraph read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const BipartiteGraph& g);
void write_edge_list(const std::filesystem::path& path, const BipartiteGraph& g);

}  // namespace graphadv
