#pragma once

#include <cstdint>
#include <vector>

#include "graphadv/graph.hpp"

namespace graphadv {

/// Community of every node: hosts and domains are indexed as in the graph.
struct CommunityPartition {
  std::vector<int> host_community;
  std::vector<int> domain_community;
  int num_communities = 0;
  double modularity = 0.0;
  /// Q of the partition on the input graph after each pass, starting with
  /// the all-singletons partition.
  std::vector<double> pass_modularity;
};

/// Newman modularity of a host/domain partition on the one-mode view of g.
double modularity(const BipartiteGraph& g, const std::vector<int>& host_community,
                  const std::vector<int>& domain_community);

/// Louvain: local moves then aggregation, repeated until no move improves Q.
CommunityPartition louvain(const BipartiteGraph& g, std::uint64_t seed);

/// Restricts a partition to domains; communities without domains vanish.
Clustering domain_clusters_of(const BipartiteGraph& g, const CommunityPartition& p);

}  // namespace graphadv
