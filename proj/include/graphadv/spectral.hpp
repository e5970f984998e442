#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "graphadv/graph.hpp"

namespace graphadv {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Hosts × domains, w_ij = 1/deg(host i) for every edge.
SparseMatrix association_matrix(const BipartiteGraph& g);

struct SvdResult {
  Eigen::MatrixXd u;       // rows × k
  Eigen::MatrixXd v;       // cols × k
  Eigen::VectorXd sigma;   // descending
  bool rank_deficient = false;
  bool converged = false;
  int iterations = 0;
};

struct SvdOptions {
  int oversample = 10;
  double tolerance = 1e-10;  // residual relative to sigma_1
  int max_iterations = 300;
  int check_every = 4;  // iterations between residual checks
};

/// Top-k singular triplets by randomized block subspace iteration. If k
/// exceeds the matrix rank the missing triplets are zero and the result is
/// flagged rank deficient.
SvdResult truncated_svd(const SparseMatrix& m, int k, std::uint64_t seed, const SvdOptions& opts = {});

/// Row vectors for a list of nodes.
struct Embedding {
  std::vector<std::string> nodes;
  Eigen::MatrixXd vectors;  // one row per node
  std::string source;       // "spectral" or "node2vec"
  std::map<std::string, std::string> hyperparameters;
  std::vector<double> singular_values;
  bool rank_deficient = false;

  [[nodiscard]] int dimension() const { return static_cast<int>(vectors.cols()); }
};

/// Domain embedding from the top-k right singular vectors, rows scaled to
/// unit length. Rows that are numerically zero stay zero.
Embedding spectral_embed(const BipartiteGraph& g, int k, std::uint64_t seed);

/// Singular values of the association matrix, up to `count` of them.
std::vector<double> singular_values(const BipartiteGraph& g, int count, std::uint64_t seed);

struct ScreeChoice {
  int rank = 1;
  bool plateaued = true;
};

/// First 1-based i such that every relative gap (σ_j − σ_{j+1})/σ_1 with
/// j in [i, i+window) is below `threshold`. Gaps past the end of the list are
/// not required. Without a plateau the list length is returned with
/// `plateaued` false.
ScreeChoice scree_select_rank(const std::vector<double>& values, double threshold = 0.01, int window = 3);

void write_embedding(std::ostream& out, const Embedding& e);
void write_scree_csv(std::ostream& out, const std::vector<double>& values);

}  // namespace graphadv
