#include "dssnal/gossip.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace dssnal {

namespace {

double dense_lambda_max(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

GossipMatrix::GossipMatrix(std::vector<Row> rows) : rows_(std::move(rows)) {
  lambda_max_ = dense_lambda_max(dense());
}

GossipMatrix GossipMatrix::from_dense(const Eigen::MatrixXd& dense, double drop_tol) {
  if (dense.rows() != dense.cols()) throw TopologyError("gossip matrix must be square");
  std::vector<Row> rows(static_cast<size_t>(dense.rows()));
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    Row& row = rows[static_cast<size_t>(i)];
    for (Eigen::Index k = 0; k < dense.cols(); ++k) {
      if (i == k || std::abs(dense(i, k)) > drop_tol) row.emplace_back(static_cast<int>(k), dense(i, k));
    }
  }
  return GossipMatrix(std::move(rows));
}

double GossipMatrix::entry(int i, int k) const {
  const Row& row = rows_[static_cast<size_t>(i)];
  auto it = std::lower_bound(row.begin(), row.end(), k,
                             [](const std::pair<int, double>& e, int key) { return e.first < key; });
  return (it != row.end() && it->first == k) ? it->second : 0.0;
}

double GossipMatrix::stack_frobenius_sq_norm_per_dim() const {
  double sq = static_cast<double>(size());
  for (const auto& row : rows_)
    for (const auto& [k, w] : row) sq += w * w;
  return sq;
}

Eigen::MatrixXd GossipMatrix::dense() const {
  const int m = size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (const auto& [k, w] : rows_[static_cast<size_t>(i)]) out(i, k) = w;
  return out;
}

GossipMatrix projection_gossip(int m) {
  if (m < 2) throw TopologyError("projection gossip needs at least 2 agents");
  const double off = -1.0 / static_cast<double>(m);
  std::vector<GossipMatrix::Row> rows(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    auto& row = rows[static_cast<size_t>(i)];
    row.reserve(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) row.emplace_back(k, k == i ? 1.0 + off : off);
  }
  return GossipMatrix(std::move(rows));
}

GossipMatrix laplacian_gossip(const Graph& g) {
  if (!g.is_connected()) throw TopologyError("graph Laplacian requires a connected graph");
  std::vector<GossipMatrix::Row> rows(static_cast<size_t>(g.m));
  for (int i = 0; i < g.m; ++i) {
    auto& row = rows[static_cast<size_t>(i)];
    const auto& nbrs = g.neighbors[static_cast<size_t>(i)];
    row.reserve(nbrs.size() + 1);
    bool self_placed = false;
    for (int k : nbrs) {
      if (!self_placed && k > i) {
        row.emplace_back(i, static_cast<double>(g.degree(i)));
        self_placed = true;
      }
      row.emplace_back(k, -1.0);
    }
    if (!self_placed) row.emplace_back(i, static_cast<double>(g.degree(i)));
  }
  return GossipMatrix(std::move(rows));
}

std::string GossipValidation::report() const {
  std::ostringstream os;
  auto line = [&os](const char* name, bool ok) { os << "  " << name << ": " << (ok ? "pass" : "FAIL") << "\n"; };
  line("(a) symmetry", symmetric);
  line("(b) positive semidefinite", positive_semidefinite);
  line("(c) null space = span{ones}", connectivity);
  line("(d) graph induced sparsity", graph_induced);
  return os.str();
}

GossipValidation validate_gossip(const GossipMatrix& L, const Graph& g, double tol_psd,
                                 double tol_null) {
  if (L.size() != g.m) throw TopologyError("gossip matrix and graph sizes differ");
  GossipValidation out;
  const Eigen::MatrixXd M = L.dense();
  const int m = L.size();

  out.symmetric = ((M - M.transpose()).cwiseAbs().maxCoeff() <= tol_psd * std::max(1.0, M.cwiseAbs().maxCoeff()));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (M + M.transpose()));
  const Eigen::VectorXd evals = eig.eigenvalues();
  out.min_eigenvalue = evals.minCoeff();
  out.positive_semidefinite = out.min_eigenvalue >= -tol_psd;

  int near_zero = 0;
  int zero_index = -1;
  for (int i = 0; i < m; ++i) {
    if (std::abs(evals[i]) <= tol_null) {
      ++near_zero;
      zero_index = i;
    }
  }
  if (near_zero == 1) {
    out.null_eigenvalue = evals[zero_index];
    const Eigen::VectorXd v = eig.eigenvectors().col(zero_index);
    out.ones_alignment = std::abs(v.sum()) / std::sqrt(static_cast<double>(m));
    out.connectivity = out.ones_alignment >= 1.0 - 1e-8;
  }

  out.graph_induced = true;
  for (int i = 0; i < m && out.graph_induced; ++i) {
    for (const auto& [k, w] : L.row(i)) {
      if (w != 0.0 && k != i && !g.are_adjacent(i, k)) {
        out.graph_induced = false;
        break;
      }
    }
  }
  return out;
}

Eigen::VectorXd local_weighted_sum(int i, const GossipMatrix& L,
                                   const std::map<int, Eigen::VectorXd>& values) {
  return weighted_neighbor_sum(i, L, [&](int k) -> const Eigen::VectorXd& {
    auto it = values.find(k);
    if (it == values.end())
      throw IncompleteExchangeError("agent " + std::to_string(i) + " is missing the block of agent " +
                                    std::to_string(k));
    return it->second;
  });
}

}  // namespace dssnal
