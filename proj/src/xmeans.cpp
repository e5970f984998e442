#include "graphadv/xmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "graphadv/rng.hpp"

namespace graphadv {

namespace {

using Matrix = Eigen::MatrixXd;

Matrix kmeans_pp(const Matrix& x, const std::vector<Eigen::Index>& idx, int k, Rng& rng) {
  Matrix c(k, x.cols());
  const auto n = idx.size();
  c.row(0) = x.row(idx[rng.uniform(n)]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], (x.row(idx[i]) - c.row(j - 1)).squaredNorm());
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double t = rng.uniform01() * total;
      for (pick = 0; pick + 1 < n && t >= d2[pick]; ++pick) t -= d2[pick];
    } else {
      pick = rng.uniform(n);
    }
    c.row(j) = x.row(idx[pick]);
  }
  return c;
}

// Lloyd iterations restricted to the rows in idx. Returns labels aligned with idx.
std::vector<int> lloyd(const Matrix& x, const std::vector<Eigen::Index>& idx, Matrix& c, int max_iter) {
  const int k = static_cast<int>(c.rows());
  std::vector<int> lab(idx.size(), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        double d = (x.row(idx[i]) - c.row(j)).squaredNorm();
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      if (lab[i] != best) {
        lab[i] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sum = Matrix::Zero(k, x.cols());
    std::vector<int> cnt(k, 0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      sum.row(lab[i]) += x.row(idx[i]);
      ++cnt[lab[i]];
    }
    for (int j = 0; j < k; ++j)
      if (cnt[j] > 0) c.row(j) = sum.row(j) / cnt[j];
  }
  return lab;
}

// Spherical Gaussians with one variance per cluster.
double bic_of(const Matrix& x, const std::vector<Eigen::Index>& idx, const std::vector<int>& lab, const Matrix& c) {
  const int K = static_cast<int>(c.rows());
  const double N = static_cast<double>(idx.size());
  const double M = static_cast<double>(x.cols());
  if (N <= K) return -std::numeric_limits<double>::infinity();
  std::vector<double> n(K, 0.0), sse(K, 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sse[lab[i]] += (x.row(idx[i]) - c.row(lab[i])).squaredNorm();
    n[lab[i]] += 1.0;
  }
  double l = 0.0;
  for (int j = 0; j < K; ++j) {
    if (n[j] <= 0.0) continue;
    const double dof = std::max(n[j] - 1.0, 1.0);
    const double var = std::max(sse[j] / (M * dof), 1e-12);
    l += n[j] * std::log(n[j] / N) - n[j] * M / 2.0 * std::log(2.0 * std::numbers::pi * var) - M * dof / 2.0;
  }
  const double p = (K - 1) + M * K + K;
  return l - p / 2.0 * std::log(N);
}

bool all_identical(const Matrix& x, const std::vector<Eigen::Index>& idx) {
  for (std::size_t i = 1; i < idx.size(); ++i)
    if (x.row(idx[i]) != x.row(idx[0])) return false;
  return true;
}

}  // namespace

double xmeans_bic(const Matrix& points, const std::vector<int>& labels, const Matrix& centers) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) idx[static_cast<std::size_t>(i)] = i;
  return bic_of(points, idx, labels, centers);
}

std::vector<int> xmeans(const Matrix& x, const XMeansParams& params, std::uint64_t seed) {
  if (params.k_min < 1 || params.k_max < params.k_min)
    throw std::invalid_argument("xmeans: need 1 <= k_min <= k_max");
  const auto n = static_cast<int>(x.rows());
  if (n == 0) return {};
  if (n <= params.k_min) {
    std::vector<int> lab(n);
    for (int i = 0; i < n; ++i) lab[i] = i;
    return lab;
  }
  Rng rng(derive_seed(seed, "xmeans"));
  std::vector<Eigen::Index> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  Matrix centers = kmeans_pp(x, all, params.k_min, rng);
  std::vector<int> lab = lloyd(x, all, centers, params.max_lloyd_iterations);
  const int k_cap = std::min(params.k_max, n);

  while (static_cast<int>(centers.rows()) < k_cap) {
    const int k = static_cast<int>(centers.rows());
    std::vector<std::vector<Eigen::Index>> members(k);
    for (int i = 0; i < n; ++i) members[lab[i]].push_back(i);
    std::vector<Eigen::RowVectorXd> next;
    int budget = k_cap - k;
    for (int j = 0; j < k; ++j) {
      const auto& m = members[j];
      bool split = false;
      if (budget > 0 && m.size() >= 2 && !all_identical(x, m)) {
        Rng local = rng.split(static_cast<std::uint64_t>(k) * 1000003u + static_cast<std::uint64_t>(j));
        Matrix parent = centers.row(j);
        std::vector<int> zero(m.size(), 0);
        Matrix kids = kmeans_pp(x, m, 2, local);
        std::vector<int> kid_lab = lloyd(x, m, kids, params.max_lloyd_iterations);
        if (bic_of(x, m, kid_lab, kids) > bic_of(x, m, zero, parent)) {
          next.push_back(kids.row(0));
          next.push_back(kids.row(1));
          --budget;
          split = true;
        }
      }
      if (!split) next.push_back(centers.row(j));
    }
    if (static_cast<int>(next.size()) == k) break;
    centers.resize(static_cast<Eigen::Index>(next.size()), x.cols());
    for (std::size_t j = 0; j < next.size(); ++j) centers.row(static_cast<Eigen::Index>(j)) = next[j];
    lab = lloyd(x, all, centers, params.max_lloyd_iterations);
  }
  // Drop empty clusters and renumber.
  std::vector<int> remap(centers.rows(), -1);
  int used = 0;
  for (int& l : lab) {
    if (remap[l] < 0) remap[l] = used++;
    l = remap[l];
  }
  return lab;
}

Clustering xmeans_cluster(const Embedding& e, Backend backend, const XMeansParams& params, std::uint64_t seed) {
  std::vector<int> lab = xmeans(e.vectors, params, seed);
  auto hp = e.hyperparameters;
  hp["xmeans-k-min"] = std::to_string(params.k_min);
  hp["xmeans-k-max"] = std::to_string(params.k_max);
  return Clustering::from_labels(e.nodes, lab, backend, std::move(hp));
}

}  // namespace graphadv
