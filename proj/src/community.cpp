#include "graphadv/community.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "graphadv/rng.hpp"

namespace graphadv {

namespace {

// Weighted undirected graph; self-loop weight is stored once in `loop` and
// counts twice towards the degree, as for the summed adjacency of a merged node.
struct WeightedGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> loop;
  std::vector<double> degree;
  double total = 0.0;  // sum of degrees = 2m

  int size() const { return static_cast<int>(adj.size()); }
};

WeightedGraph from_bipartite(const BipartiteGraph& g) {
  const int H = static_cast<int>(g.num_hosts());
  WeightedGraph w;
  w.adj.resize(g.num_hosts() + g.num_domains());
  w.loop.assign(w.adj.size(), 0.0);
  w.degree.assign(w.adj.size(), 0.0);
  for (const Edge& e : g.edges()) {
    int h = static_cast<int>(e.host), d = H + static_cast<int>(e.domain);
    w.adj[h].push_back({d, 1.0});
    w.adj[d].push_back({h, 1.0});
    w.degree[h] += 1.0;
    w.degree[d] += 1.0;
  }
  w.total = 2.0 * static_cast<double>(g.num_edges());
  return w;
}

double modularity_of(const WeightedGraph& w, const std::vector<int>& comm) {
  if (w.total <= 0.0) return 0.0;
  int k = comm.empty() ? 0 : *std::max_element(comm.begin(), comm.end()) + 1;
  std::vector<double> in(k, 0.0), tot(k, 0.0);
  for (int i = 0; i < w.size(); ++i) {
    tot[comm[i]] += w.degree[i];
    in[comm[i]] += 2.0 * w.loop[i];
    for (auto [j, wt] : w.adj[i])
      if (comm[j] == comm[i]) in[comm[i]] += wt;
  }
  double q = 0.0;
  for (int c = 0; c < k; ++c) q += in[c] / w.total - (tot[c] / w.total) * (tot[c] / w.total);
  return q;
}

// One round of local moves. Returns true if any node changed community.
bool local_moves(const WeightedGraph& w, std::vector<int>& comm, Rng& rng) {
  const int n = w.size();
  std::vector<double> tot(n, 0.0);
  for (int i = 0; i < n; ++i) tot[comm[i]] += w.degree[i];
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());

  std::vector<double> link(n, 0.0);
  std::vector<int> touched;
  bool any = false;
  for (bool moved = true; moved;) {
    moved = false;
    for (int i : order) {
      if (w.degree[i] <= 0.0) continue;
      const int own = comm[i];
      touched.clear();
      touched.push_back(own);
      for (auto [j, wt] : w.adj[i]) {
        if (link[comm[j]] == 0.0 && comm[j] != own) touched.push_back(comm[j]);
        link[comm[j]] += wt;
      }
      tot[own] -= w.degree[i];
      const double ki = w.degree[i];
      auto gain = [&](int c) { return link[c] - tot[c] * ki / w.total; };
      int best = own;
      double best_gain = gain(own);
      for (int c : touched) {
        double gc = gain(c);
        if (gc > best_gain + 1e-12) {
          best_gain = gc;
          best = c;
        }
      }
      tot[best] += ki;
      if (best != own) {
        comm[i] = best;
        moved = any = true;
      }
      for (int c : touched) link[c] = 0.0;
    }
  }
  return any;
}

// Renumbers communities 0..k-1 in order of first appearance.
int compact(std::vector<int>& comm) {
  std::unordered_map<int, int> remap;
  for (int& c : comm) {
    auto [it, fresh] = remap.try_emplace(c, static_cast<int>(remap.size()));
    c = it->second;
  }
  return static_cast<int>(remap.size());
}

WeightedGraph aggregate(const WeightedGraph& w, const std::vector<int>& comm, int k) {
  WeightedGraph out;
  out.adj.resize(k);
  out.loop.assign(k, 0.0);
  out.degree.assign(k, 0.0);
  out.total = w.total;
  std::vector<std::unordered_map<int, double>> acc(k);
  for (int i = 0; i < w.size(); ++i) {
    const int ci = comm[i];
    out.degree[ci] += w.degree[i];
    out.loop[ci] += w.loop[i];
    for (auto [j, wt] : w.adj[i]) {
      if (comm[j] == ci) out.loop[ci] += wt / 2.0;  // each internal edge is seen from both ends
      else acc[ci][comm[j]] += wt;
    }
  }
  for (int c = 0; c < k; ++c) {
    out.adj[c].assign(acc[c].begin(), acc[c].end());
    std::sort(out.adj[c].begin(), out.adj[c].end());
  }
  return out;
}

}  // namespace

double modularity(const BipartiteGraph& g, const std::vector<int>& host_community,
                  const std::vector<int>& domain_community) {
  std::vector<int> comm(host_community);
  comm.insert(comm.end(), domain_community.begin(), domain_community.end());
  compact(comm);
  return modularity_of(from_bipartite(g), comm);
}

CommunityPartition louvain(const BipartiteGraph& g, std::uint64_t seed) {
  const WeightedGraph base = from_bipartite(g);
  const int n = base.size();
  std::vector<int> node_comm(n);
  std::iota(node_comm.begin(), node_comm.end(), 0);

  CommunityPartition p;
  p.pass_modularity.push_back(modularity_of(base, node_comm));

  Rng rng(derive_seed(seed, "louvain"));
  WeightedGraph level = base;
  for (int pass = 0; level.size() > 0; ++pass) {
    std::vector<int> comm(level.size());
    std::iota(comm.begin(), comm.end(), 0);
    Rng pass_rng = rng.split(static_cast<std::uint64_t>(pass));
    if (!local_moves(level, comm, pass_rng)) break;
    int k = compact(comm);
    for (int& c : node_comm) c = comm[c];
    p.pass_modularity.push_back(modularity_of(base, node_comm));
    if (k == level.size()) break;
    level = aggregate(level, comm, k);
  }

  p.num_communities = compact(node_comm);
  p.modularity = modularity_of(base, node_comm);
  const auto H = static_cast<std::ptrdiff_t>(g.num_hosts());
  p.host_community.assign(node_comm.begin(), node_comm.begin() + H);
  p.domain_community.assign(node_comm.begin() + H, node_comm.end());
  return p;
}

Clustering domain_clusters_of(const BipartiteGraph& g, const CommunityPartition& p) {
  return Clustering::from_labels(g.domains(), p.domain_community, Backend::community);
}

}  // namespace graphadv
