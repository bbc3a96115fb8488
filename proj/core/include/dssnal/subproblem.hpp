#pragma once

#include <Eigen/Core>

#include "dssnal/blockvec.hpp"
#include "dssnal/gossip.hpp"
#include "dssnal/netsim.hpp"
#include "dssnal/problems.hpp"

namespace dssnal {

struct PhiConstants {
  double mu = 0.0;  // strong convexity of the penalized surrogate
  double L = 0.0;   // smoothness of the penalized surrogate
};

/// mu = min_i mu_i; L = max_i L_i + sigma * (1 + lambda_max^2), the squared
/// spectral norm of the stacked operator [I; W].
PhiConstants phi_constants(const SmoothnessConstants& constants, double sigma,
                           const GossipMatrix& gossip);

/// Jacobian selections frozen at one point: per-agent per-sample curvature
/// weights for the smooth part and the diagonal {0,1} derivative of the
/// conjugate prox. Held fixed across a whole direction solve.
struct JacobianSelections {
  std::vector<Eigen::ArrayXd> curvature;
  std::vector<Eigen::ArrayXd> prox_diag;
};

/// Oracle for the inner objective at one fixed (sigma, multiplier) pair:
/// distributed gradient evaluation, generalized-Hessian matvec, and the
/// (mu, L) constants both inner solvers consume.
///
/// The multiplier splits into an upper block (one n-vector per agent,
/// paired with the identity rows of the stacked operator) and a lower block
/// (paired with the gossip rows). refresh_u caches, per agent,
///   u_upper_i = sigma * x_i - lambda_upper_i
///   u_lower_i = sigma * (W x)_i - lambda_lower_i
/// plus the neighbor combination of u_lower that the gradient needs, at the
/// cost of exactly two exchange rounds (x, then u_lower). Consuming the
/// caches at any other point is a StalenessError, never a silent recompute,
/// so round counts stay honest.
class Subproblem {
 public:
  Subproblem(const LocalObjective& obj, const GossipMatrix& gossip, SyncNetwork& net, double sigma,
             BlockVec lambda_upper, BlockVec lambda_lower);

  int agents() const { return net_.agent_count(); }
  int dim() const { return obj_.dim(); }
  double sigma() const { return sigma_; }
  double mu() const { return constants_.mu; }
  double L() const { return constants_.L; }
  const LocalObjective& objective() const { return obj_; }
  const GossipMatrix& gossip() const { return gossip_; }
  SyncNetwork& network() const { return net_; }
  const BlockVec& lambda_upper() const { return lambda_upper_; }
  const BlockVec& lambda_lower() const { return lambda_lower_; }

  /// Two exchange rounds: share x, form u_lower, share u_lower.
  void refresh_u(const BlockVec& x);
  bool fresh() const { return fresh_; }
  bool fresh_at(const BlockVec& x) const;
  const BlockVec& u_upper() const { return u_upper_; }
  const BlockVec& u_lower() const { return u_lower_; }
  const BlockVec& refreshed_point() const { return x_cached_; }

  struct Gradient {
    BlockVec blocks;
    double sq_norm = 0.0;
    double norm = 0.0;
  };

  /// Assembles the gradient from the caches (no exchange) and reduces its
  /// squared norm once. Requires fresh caches at exactly this x.
  Gradient grad_phi(const BlockVec& x) const;

  /// Samples the curvature and prox selections at the refreshed point.
  JacobianSelections freeze_selections() const;

  /// Generalized-Hessian matvec against frozen selections: two exchange
  /// rounds (the direction, then its neighbor combination).
  BlockVec apply_generalized_hessian(const JacobianSelections& sel, const BlockVec& d) const;

 private:
  const LocalObjective& obj_;
  const GossipMatrix& gossip_;
  SyncNetwork& net_;
  double sigma_;
  BlockVec lambda_upper_;
  BlockVec lambda_lower_;
  PhiConstants constants_;

  bool fresh_ = false;
  BlockVec x_cached_;
  BlockVec u_upper_;
  BlockVec u_lower_;
  BlockVec coupling_;  // per-agent neighbor combination of u_lower
};

}  // namespace dssnal
