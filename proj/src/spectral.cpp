#include "graphadv/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "graphadv/rng.hpp"

namespace graphadv {

SparseMatrix association_matrix(const BipartiteGraph& g) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(g.num_edges());
  for (const Edge& e : g.edges())
    t.emplace_back(e.host, e.domain, 1.0 / static_cast<double>(g.host_degree(e.host)));
  SparseMatrix m(static_cast<Eigen::Index>(g.num_hosts()), static_cast<Eigen::Index>(g.num_domains()));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

}  // namespace

SvdResult truncated_svd(const SparseMatrix& m, int k, std::uint64_t seed, const SvdOptions& opts) {
  if (k < 1) throw std::invalid_argument("truncated_svd: k must be positive");
  const Eigen::Index rows = m.rows(), cols = m.cols();
  const Eigen::Index small = std::min(rows, cols);
  SvdResult r;
  r.u = Eigen::MatrixXd::Zero(rows, k);
  r.v = Eigen::MatrixXd::Zero(cols, k);
  r.sigma = Eigen::VectorXd::Zero(k);
  if (small == 0) {
    r.rank_deficient = true;
    r.converged = true;
    return r;
  }
  const Eigen::Index kk = std::min<Eigen::Index>(k, small);
  Eigen::Index block = std::min<Eigen::Index>(small, kk + std::max<Eigen::Index>(opts.oversample, kk / 2));
  // Past half the space, one exact pass is cheaper than iterating.
  if (2 * block >= small) block = small;
  // Iterate in the smaller of the two spaces.
  const bool host_side = rows <= cols;
  const SparseMatrix mt = m.transpose();
  auto gram = [&](const Eigen::MatrixXd& q) -> Eigen::MatrixXd {
    if (host_side) return m * (mt * q);
    return mt * (m * q);
  };

  Rng rng(derive_seed(seed, "svd"));
  Eigen::MatrixXd q(small, block);
  for (Eigen::Index j = 0; j < block; ++j)
    for (Eigen::Index i = 0; i < small; ++i) q(i, j) = rng.normal();
  q = orthonormalize(q);

  Eigen::MatrixXd u, v;
  Eigen::VectorXd s;
  const int max_iter = block == small ? 1 : opts.max_iterations;
  for (int it = 1; it <= max_iter; ++it) {
    if (block < small) q = orthonormalize(gram(q));
    r.iterations = it;
    if (it % opts.check_every != 0 && it < max_iter) continue;
    // Ritz step: B = (other side) · Q, whose SVD gives both singular bases.
    Eigen::MatrixXd b = host_side ? Eigen::MatrixXd(mt * q) : Eigen::MatrixXd(m * q);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
    s = svd.singularValues();
    if (host_side) {
      v = svd.matrixU();
      u = q * svd.matrixV();
    } else {
      u = svd.matrixU();
      v = q * svd.matrixV();
    }
    if (block == small) {
      r.converged = true;
      break;
    }
    const double s1 = s(0);
    if (s1 <= 0.0) {
      r.converged = true;
      break;
    }
    double worst = 0.0;
    for (Eigen::Index j = 0; j < kk; ++j) {
      double res = (m * v.col(j) - s(j) * u.col(j)).norm();
      worst = std::max(worst, res);
    }
    if (worst <= opts.tolerance * s1) {
      r.converged = true;
      break;
    }
  }
  const double s1 = s(0);
  for (Eigen::Index j = 0; j < kk; ++j) {
    r.sigma(j) = s(j);
    r.u.col(j) = u.col(j);
    r.v.col(j) = v.col(j);
  }
  const double floor = 1e-12 * std::max(s1, 1e-300);
  for (Eigen::Index j = 0; j < kk; ++j) {
    if (r.sigma(j) <= floor) {
      r.sigma(j) = 0.0;
      r.u.col(j).setZero();
      r.v.col(j).setZero();
      r.rank_deficient = true;
    }
  }
  if (kk < k) r.rank_deficient = true;
  return r;
}

Embedding spectral_embed(const BipartiteGraph& g, int k, std::uint64_t seed) {
  Embedding e;
  e.nodes = g.domains();
  e.source = "spectral";
  e.hyperparameters["svd-rank"] = std::to_string(k);
  SvdResult svd = truncated_svd(association_matrix(g), k, seed);
  e.rank_deficient = svd.rank_deficient;
  e.singular_values.assign(svd.sigma.data(), svd.sigma.data() + svd.sigma.size());
  e.vectors = svd.v;
  for (Eigen::Index i = 0; i < e.vectors.rows(); ++i) {
    double n = e.vectors.row(i).norm();
    if (n < 1e-7) e.vectors.row(i).setZero();
    else e.vectors.row(i) /= n;
  }
  return e;
}

std::vector<double> singular_values(const BipartiteGraph& g, int count, std::uint64_t seed) {
  const int small = static_cast<int>(std::min(g.num_hosts(), g.num_domains()));
  count = std::min(count, small);
  if (count <= 0) return {};
  SvdResult svd = truncated_svd(association_matrix(g), count, seed);
  return {svd.sigma.data(), svd.sigma.data() + svd.sigma.size()};
}

ScreeChoice scree_select_rank(const std::vector<double>& values, double threshold, int window) {
  const int n = static_cast<int>(values.size());
  if (n < 3) throw std::invalid_argument("scree_select_rank: need at least 3 values");
  const double s1 = values[0];
  if (s1 <= 0.0) return {1, true};
  // gap(j) for 1-based j compares values j and j+1.
  auto gap = [&](int j) { return (values[j - 1] - values[j]) / s1; };
  for (int i = 1; i < n; ++i) {
    bool flat = true;
    for (int j = i; j < std::min(i + window, n); ++j)
      if (gap(j) >= threshold) {
        flat = false;
        break;
      }
    if (flat) return {i, true};
  }
  return {n, false};
}

void write_embedding(std::ostream& out, const Embedding& e) {
  for (std::size_t i = 0; i < e.nodes.size(); ++i) {
    out << e.nodes[i] << '\t';
    for (Eigen::Index j = 0; j < e.vectors.cols(); ++j) {
      if (j) out << ',';
      out << e.vectors(static_cast<Eigen::Index>(i), j);
    }
    out << '\n';
  }
}

void write_scree_csv(std::ostream& out, const std::vector<double>& values) {
  out << "index,singular_value\n";
  for (std::size_t i = 0; i < values.size(); ++i) out << i + 1 << ',' << values[i] << '\n';
}

}  // namespace graphadv
