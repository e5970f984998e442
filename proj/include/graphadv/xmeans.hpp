#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "graphadv/graph.hpp"
#include "graphadv/spectral.hpp"

namespace graphadv {

struct XMeansParams {
  int k_min = 1;
  int k_max = 20;
  int max_lloyd_iterations = 100;
};

/// BIC of a partition under spherical Gaussians with one variance per cluster.
double xmeans_bic(const Eigen::MatrixXd& points, const std::vector<int>& labels, const Eigen::MatrixXd& centers);

/// Cluster labels 0..k-1 for the rows of `points`.
std::vector<int> xmeans(const Eigen::MatrixXd& points, const XMeansParams& params, std::uint64_t seed);

Clustering xmeans_cluster(const Embedding& e, Backend backend, const XMeansParams& params, std::uint64_t seed);

}  // namespace graphadv
