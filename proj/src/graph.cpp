#include "graphadv/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "graphadv/errors.hpp"

namespace graphadv {

NodeIndex BipartiteGraph::add_host(std::string_view host) {
  auto [it, inserted] = host_lookup_.try_emplace(std::string(host), static_cast<NodeIndex>(hosts_.size()));
  if (inserted) {
    hosts_.emplace_back(host);
    host_adj_.emplace_back();
  }
  return it->second;
}

NodeIndex BipartiteGraph::add_domain(std::string_view domain) {
  auto [it, inserted] =
      domain_lookup_.try_emplace(std::string(domain), static_cast<NodeIndex>(domains_.size()));
  if (inserted) {
    domains_.emplace_back(domain);
    domain_adj_.emplace_back();
  }
  return it->second;
}

bool BipartiteGraph::add_edge(std::string_view host, std::string_view domain) {
  NodeIndex h = add_host(host);
  NodeIndex d = add_domain(domain);
  return add_edge(h, d);
}

bool BipartiteGraph::add_edge(NodeIndex h, NodeIndex d) {
  if (!edge_set_.insert(edge_key(h, d)).second) return false;
  edges_.push_back({h, d});
  host_adj_[h].push_back(d);
  domain_adj_[d].push_back(h);
  return true;
}

std::optional<NodeIndex> BipartiteGraph::host_index(std::string_view host) const {
  auto it = host_lookup_.find(std::string(host));
  if (it == host_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeIndex> BipartiteGraph::domain_index(std::string_view domain) const {
  auto it = domain_lookup_.find(std::string(domain));
  if (it == domain_lookup_.end()) return std::nullopt;
  return it->second;
}

bool BipartiteGraph::has_edge(NodeIndex h, NodeIndex d) const {
  return edge_set_.count(edge_key(h, d)) > 0;
}

bool BipartiteGraph::has_edge(std::string_view host, std::string_view domain) const {
  auto h = host_index(host);
  auto d = domain_index(domain);
  return h && d && has_edge(*h, *d);
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::community: return "community";
    case Backend::spectral: return "spectral";
    case Backend::node2vec: return "node2vec";
  }
  return "unknown";
}

Backend backend_from_string(std::string_view s) {
  if (s == "community") return Backend::community;
  if (s == "spectral") return Backend::spectral;
  if (s == "node2vec") return Backend::node2vec;
  throw UsageError("unknown backend: " + std::string(s));
}

Clustering Clustering::from_labels(std::vector<std::string> domains, const std::vector<int>& raw_labels,
                                   Backend backend, std::map<std::string, std::string> hyperparameters) {
  if (domains.size() != raw_labels.size()) throw DataError("clustering: label count mismatch");
  Clustering c;
  c.backend = backend;
  c.hyperparameters = std::move(hyperparameters);
  std::unordered_map<int, int> remap;
  c.assignment_.reserve(raw_labels.size());
  for (int raw : raw_labels) {
    auto [it, inserted] = remap.try_emplace(raw, static_cast<int>(remap.size()));
    c.assignment_.push_back(it->second);
  }
  c.num_clusters_ = static_cast<int>(remap.size());
  c.domains_ = std::move(domains);
  for (std::size_t i = 0; i < c.domains_.size(); ++i) {
    if (!c.lookup_.emplace(c.domains_[i], c.assignment_[i]).second)
      throw DataError("clustering: duplicate domain " + c.domains_[i]);
  }
  return c;
}

std::optional<int> Clustering::cluster_of(std::string_view domain) const {
  auto it = lookup_.find(std::string(domain));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<std::string>> Clustering::members() const {
  std::vector<std::vector<std::string>> out(static_cast<std::size_t>(num_clusters_));
  for (std::size_t i = 0; i < domains_.size(); ++i) out[assignment_[i]].push_back(domains_[i]);
  return out;
}

double density(const BipartiteGraph& g) {
  if (g.num_hosts() == 0 || g.num_domains() == 0) throw DataError("degenerate graph");
  return static_cast<double>(g.num_edges()) /
         (static_cast<double>(g.num_hosts()) * static_cast<double>(g.num_domains()));
}

double density_relative(const BipartiteGraph& attacked, std::size_t original_hosts,
                        std::size_t original_domains) {
  double denom = static_cast<double>(original_hosts) * static_cast<double>(original_domains);
  if (denom < 1.0) throw DataError("density_relative: zero denominator");
  if (static_cast<double>(attacked.num_edges()) > denom)
    throw DataError("density_relative: more edges than the original dimensions allow");
  return static_cast<double>(attacked.num_edges()) / denom;
}

BipartiteGraph complete(const BipartiteGraph& g) {
  if (g.num_hosts() == 0 || g.num_domains() == 0) throw DataError("degenerate graph");
  BipartiteGraph out;
  for (const auto& h : g.hosts()) out.add_host(h);
  for (const auto& d : g.domains()) out.add_domain(d);
  for (NodeIndex h = 0; h < out.num_hosts(); ++h)
    for (NodeIndex d = 0; d < out.num_domains(); ++d) out.add_edge(h, d);
  return out;
}

std::map<std::string, double> host_degree_percentiles(const BipartiteGraph& g,
                                                      const std::vector<std::string>& targets) {
  std::vector<std::size_t> degrees;
  degrees.reserve(g.num_hosts());
  for (NodeIndex h = 0; h < g.num_hosts(); ++h) degrees.push_back(g.host_degree(h));
  std::sort(degrees.begin(), degrees.end());
  std::map<std::string, double> out;
  for (const auto& t : targets) {
    auto idx = g.host_index(t);
    if (!idx) throw DataError("host_degree_percentiles: unknown host " + t);
    std::size_t deg = g.host_degree(*idx);
    auto at_most = static_cast<double>(std::upper_bound(degrees.begin(), degrees.end(), deg) - degrees.begin());
    out[t] = 100.0 * at_most / static_cast<double>(degrees.size());
  }
  return out;
}

BipartiteGraph filter_singleton_hosts(const BipartiteGraph& g) {
  BipartiteGraph out;
  for (NodeIndex h = 0; h < g.num_hosts(); ++h)
    if (g.host_degree(h) > 1) out.add_host(g.host(h));
  // Domains in original order, only those with a surviving querier.
  for (NodeIndex d = 0; d < g.num_domains(); ++d) {
    for (NodeIndex h : g.domain_neighbors(d)) {
      if (g.host_degree(h) > 1) {
        out.add_domain(g.domain(d));
        break;
      }
    }
  }
  for (const Edge& e : g.edges())
    if (g.host_degree(e.host) > 1) out.add_edge(g.host(e.host), g.domain(e.domain));
  return out;
}

bool is_subgraph_of(const BipartiteGraph& child, const BipartiteGraph& parent) {
  for (const auto& h : child.hosts())
    if (!parent.has_host(h)) return false;
  for (const auto& d : child.domains())
    if (!parent.has_domain(d)) return false;
  for (const Edge& e : child.edges())
    if (!parent.has_edge(child.host(e.host), child.domain(e.domain))) return false;
  return true;
}

BipartiteGraph read_edge_list(std::istream& in) {
  BipartiteGraph g;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    while (true) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
      throw DataError("edge list line " + std::to_string(lineno) + ": expected host<TAB>domain");
    g.add_edge(fields[0], fields[1]);
  }
  return g;
}

BipartiteGraph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open edge list " + path.string());
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const BipartiteGraph& g) {
  for (const Edge& e : g.edges()) out << g.host(e.host) << '\t' << g.domain(e.domain) << '\n';
}

void write_edge_list(const std::filesystem::path& path, const BipartiteGraph& g) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write edge list " + path.string());
  write_edge_list(out, g);
}

}  // namespace graphadv
