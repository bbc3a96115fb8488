#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dssnal/graph.hpp"

namespace dssnal {

/// Symmetric PSD mixing matrix with null space spanned by the all-ones
/// vector, stored as per-agent sparse rows that always include the
/// diagonal. Multiplication by its n-dimensional lift never materializes
/// the lifted matrix: agent i forms its output block from one round of
/// neighbor values.
class GossipMatrix {
 public:
  using Row = std::vector<std::pair<int, double>>;  // (agent, weight), sorted, self included

  /// Wraps explicit rows without checking the mixing-matrix properties;
  /// pair with validate_gossip when provenance is untrusted.
  static GossipMatrix from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);

  int size() const { return static_cast<int>(rows_.size()); }
  const Row& row(int i) const { return rows_[static_cast<size_t>(i)]; }
  double entry(int i, int k) const;

  /// Largest eigenvalue, computed densely once at construction.
  double lambda_max() const { return lambda_max_; }

  /// Squared spectral norm of the stacked operator [I; W]: 1 + lambda_max^2.
  double stack_operator_sq_norm() const { return 1.0 + lambda_max_ * lambda_max_; }

  /// Squared Frobenius norm of the same stacked operator per variable
  /// dimension: m + sum of squared weights. Loose fallback for scales where
  /// the dense eigendecomposition behind lambda_max is unaffordable.
  double stack_frobenius_sq_norm_per_dim() const;

  Eigen::MatrixXd dense() const;

 private:
  explicit GossipMatrix(std::vector<Row> rows);

  std::vector<Row> rows_;
  double lambda_max_ = 0.0;

  friend GossipMatrix projection_gossip(int m);
  friend GossipMatrix laplacian_gossip(const Graph& g);
};

/// I - (1/m) * ones * ones^T: the mixing matrix of the complete graph with
/// eigenvalues {0, 1, ..., 1}.
GossipMatrix projection_gossip(int m);

/// Standard graph Laplacian (degree on the diagonal, -1 across edges).
/// Requires a connected input.
GossipMatrix laplacian_gossip(const Graph& g);

/// Pass/fail report for the four mixing-matrix properties: symmetry,
/// positive semidefiniteness, null space = span{ones}, and sparsity
/// respecting the graph. Failures are reported, never thrown.
struct GossipValidation {
  bool symmetric = false;
  bool positive_semidefinite = false;
  bool connectivity = false;   // exactly one (near-)zero eigenvalue, eigenvector parallel to ones
  bool graph_induced = false;
  double min_eigenvalue = 0.0;
  double null_eigenvalue = 0.0;
  double ones_alignment = 0.0;  // |<v0, ones/sqrt(m)>|

  bool all_pass() const { return symmetric && positive_semidefinite && connectivity && graph_induced; }
  std::string report() const;
};

GossipValidation validate_gossip(const GossipMatrix& L, const Graph& g, double tol_psd = 1e-10,
                                 double tol_null = 1e-10);

/// Weighted sum over the closed neighborhood of agent i: the i-th block of
/// the lifted product. `values` must contain agent i and every neighbor.
Eigen::VectorXd local_weighted_sum(int i, const GossipMatrix& L,
                                   const std::map<int, Eigen::VectorXd>& values);

/// Hot-path variant: value_of(k) must return the block of agent k for every
/// k in the closed neighborhood of i.
template <typename ValueOf>
Eigen::VectorXd weighted_neighbor_sum(int i, const GossipMatrix& L, ValueOf&& value_of) {
  const auto& row = L.row(i);
  Eigen::VectorXd out;
  for (const auto& [k, w] : row) {
    const Eigen::VectorXd& v = value_of(k);
    if (out.size() == 0)
      out = w * v;
    else
      out += w * v;
  }
  return out;
}

}  // namespace dssnal
