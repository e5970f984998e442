#include "graphadv/node2vec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "graphadv/rng.hpp"

namespace graphadv {

WalkCorpus node2vec_walks(const BipartiteGraph& g, int r, int l, std::uint64_t seed) {
  if (r < 1 || l < 2) throw std::invalid_argument("node2vec_walks: need r >= 1 and l >= 2");
  const auto H = static_cast<NodeIndex>(g.num_hosts());
  const std::size_t n = g.num_hosts() + g.num_domains();
  auto neighbors = [&](NodeIndex v) -> const std::vector<NodeIndex>& {
    return v < H ? g.host_neighbors(v) : g.domain_neighbors(v - H);
  };
  WalkCorpus c;
  c.walks_per_node = r;
  c.walk_length = l;
  c.num_nodes = n;
  for (int round = 0; round < r; ++round) {
    for (NodeIndex start = 0; start < n; ++start) {
      if (neighbors(start).empty()) continue;
      Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(start)), static_cast<std::uint64_t>(round)));
      std::vector<NodeIndex> walk{start};
      walk.reserve(l);
      NodeIndex cur = start;
      while (static_cast<int>(walk.size()) < l) {
        const auto& nb = neighbors(cur);
        NodeIndex next = nb[rng.uniform(nb.size())];
        cur = cur < H ? H + next : next;
        walk.push_back(cur);
      }
      c.walks.push_back(std::move(walk));
    }
  }
  return c;
}

std::vector<NodePair> neighborhoods(const WalkCorpus& corpus, int c) {
  if (c < 1) throw std::invalid_argument("neighborhoods: context must be >= 1");
  std::vector<NodePair> pairs;
  for (const auto& w : corpus.walks)
    for (std::size_t i = 0; i < w.size(); ++i)
      for (std::size_t j = i + 1; j <= std::min(w.size() - 1, i + static_cast<std::size_t>(c)); ++j)
        pairs.emplace_back(w[i], w[j]);
  return pairs;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log σ(x), stable for large |x|.
double log_sigmoid(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace

double pair_loss(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::VectorXd>& g_ctx,
                 const std::vector<Eigen::VectorXd>& g_neg, Eigen::VectorXd* grad_f, Eigen::VectorXd* grad_ctx,
                 std::vector<Eigen::VectorXd>* grad_neg) {
  const double s = f.dot(g_ctx);
  double loss = -log_sigmoid(s);
  if (grad_f) *grad_f = -(1.0 - sigmoid(s)) * g_ctx;
  if (grad_ctx) *grad_ctx = -(1.0 - sigmoid(s)) * f;
  if (grad_neg) grad_neg->resize(g_neg.size());
  for (std::size_t n = 0; n < g_neg.size(); ++n) {
    const double t = f.dot(g_neg[n]);
    loss -= log_sigmoid(-t);
    if (grad_f) *grad_f += sigmoid(t) * g_neg[n];
    if (grad_neg) (*grad_neg)[n] = sigmoid(t) * f;
  }
  return loss;
}

TrainResult node2vec_train(const std::vector<NodePair>& pairs, std::size_t num_nodes, const Node2VecParams& p,
                           std::uint64_t seed) {
  if (p.dimensions < 2) throw std::invalid_argument("node2vec_train: dimensions must be >= 2");
  if (p.negatives < 1) throw std::invalid_argument("node2vec_train: negatives must be >= 1");
  const int d = p.dimensions;
  Rng init(derive_seed(seed, "init"));
  TrainResult r;
  r.input.resize(static_cast<Eigen::Index>(num_nodes), d);
  for (Eigen::Index i = 0; i < r.input.rows(); ++i)
    for (int j = 0; j < d; ++j) r.input(i, j) = (init.uniform01() - 0.5) / d;
  r.output = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes), d);
  if (pairs.empty() || num_nodes == 0) return r;

  // Unigram^0.75 over context occurrences, sampled by inverse CDF.
  std::vector<double> cdf(num_nodes, 0.0);
  for (const auto& [u, v] : pairs) {
    cdf[u] += 1.0;
    cdf[v] += 1.0;
  }
  for (double& x : cdf) x = std::pow(x, 0.75);
  std::partial_sum(cdf.begin(), cdf.end(), cdf.begin());
  const double mass = cdf.back();

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  const double total_steps = static_cast<double>(pairs.size()) * std::max(p.epochs, 1);
  double step = 0;
  Rng rng(derive_seed(seed, "sgd"));

  std::vector<NodeIndex> neg(p.negatives);
  std::vector<Eigen::VectorXd> g_neg(p.negatives), grad_neg;
  Eigen::VectorXd grad_f, grad_ctx;
  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double sum = 0.0;
    for (std::size_t idx : order) {
      const auto [u, v] = pairs[idx];
      const double lr = std::max(p.min_learning_rate,
                                 p.learning_rate - (p.learning_rate - p.min_learning_rate) * step / total_steps);
      step += 1.0;
      for (int n = 0; n < p.negatives; ++n) {
        double x = rng.uniform01() * mass;
        neg[n] = static_cast<NodeIndex>(std::upper_bound(cdf.begin(), cdf.end(), x) - cdf.begin());
        if (neg[n] >= num_nodes) neg[n] = static_cast<NodeIndex>(num_nodes - 1);
        g_neg[n] = r.output.row(neg[n]).transpose();
      }
      const double loss = pair_loss(r.input.row(u).transpose(), r.output.row(v).transpose(), g_neg, &grad_f,
                                    &grad_ctx, &grad_neg);
      if (!std::isfinite(loss))
        throw std::runtime_error("node2vec_train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", pair (" + std::to_string(u) + "," + std::to_string(v) + ")");
      sum += loss;
      r.output.row(v) -= lr * grad_ctx.transpose();
      for (int n = 0; n < p.negatives; ++n) r.output.row(neg[n]) -= lr * grad_neg[n].transpose();
      r.input.row(u) -= lr * grad_f.transpose();
    }
    r.epoch_loss.push_back(sum / static_cast<double>(pairs.size()));
  }
  return r;
}

Embedding node2vec_embed(const BipartiteGraph& g, const Node2VecParams& p, std::uint64_t seed) {
  WalkCorpus corpus = node2vec_walks(g, p.walks_per_node, p.walk_length, derive_seed(seed, "walks"));
  TrainResult t = node2vec_train(neighborhoods(corpus, p.context), corpus.num_nodes, p, derive_seed(seed, "train"));
  Embedding e;
  e.nodes = g.domains();
  e.source = "node2vec";
  e.hyperparameters = {{"dimensions", std::to_string(p.dimensions)},
                       {"walk-length", std::to_string(p.walk_length)},
                       {"walks-per-node", std::to_string(p.walks_per_node)},
                       {"neighborhood-size", std::to_string(p.context)},
                       {"epochs", std::to_string(p.epochs)},
                       {"negatives", std::to_string(p.negatives)}};
  e.vectors = t.input.bottomRows(static_cast<Eigen::Index>(g.num_domains()));
  return e;
}

}  // namespace graphadv
