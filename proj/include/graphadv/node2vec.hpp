#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "graphadv/graph.hpp"
#include "graphadv/spectral.hpp"

namespace graphadv {

// Walks run over the one-mode node set: host i is node i, domain j is node
// num_hosts + j.
struct WalkCorpus {
  std::vector<std::vector<NodeIndex>> walks;
  int walks_per_node = 0;
  int walk_length = 0;
  std::size_t num_nodes = 0;
};

/// r uniform random walks of length l from every node that has an edge.
WalkCorpus node2vec_walks(const BipartiteGraph& g, int r, int l, std::uint64_t seed);

using NodePair = std::pair<NodeIndex, NodeIndex>;

/// (w_i, w_j) for every walk position i and j in (i, i+c].
std::vector<NodePair> neighborhoods(const WalkCorpus& corpus, int c);

/// Skip-gram negative-sampling loss of one (center, context) pair:
///   −log σ(f·g_ctx) − Σ_n log σ(−f·g_n)
/// Gradients are written into the out-parameters when they are non-null.
double pair_loss(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::VectorXd>& g_ctx,
                 const std::vector<Eigen::VectorXd>& g_neg, Eigen::VectorXd* grad_f = nullptr,
                 Eigen::VectorXd* grad_ctx = nullptr, std::vector<Eigen::VectorXd>* grad_neg = nullptr);

struct Node2VecParams {
  int dimensions = 60;
  int walk_length = 20;
  int walks_per_node = 15;
  int context = 6;
  int epochs = 1;
  int negatives = 5;
  double learning_rate = 0.025;
  double min_learning_rate = 0.0001;
};

struct TrainResult {
  Eigen::MatrixXd input;   // one row per node
  Eigen::MatrixXd output;
  std::vector<double> epoch_loss;  // mean pair loss per epoch
};

/// SGD over shuffled pairs with unigram^0.75 negatives and a linearly
/// decaying learning rate. Throws std::runtime_error on a non-finite loss.
TrainResult node2vec_train(const std::vector<NodePair>& pairs, std::size_t num_nodes, const Node2VecParams& p,
                           std::uint64_t seed);

/// Walks, neighborhoods and training on g; returns the domain vectors.
Embedding node2vec_embed(const BipartiteGraph& g, const Node2VecParams& p, std::uint64_t seed);

}  // namespace graphadv
