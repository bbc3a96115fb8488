#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "dssnal/blockvec.hpp"
#include "dssnal/gossip.hpp"
#include "dssnal/netsim.hpp"
#include "dssnal/newton.hpp"
#include "dssnal/problems.hpp"

namespace dssnal {

/// Implementable inner-accuracy criteria. A bounds the gradient norm by a
/// summable sequence; B and C bound it relative to the multiplier movement;
/// combined requires all three at once.
enum class Criterion { A, B, C, combined };

/// The lower multiplier block can be updated by the neighbor-combined rule
/// (an extra mixing application) or by the plain rule that negates the
/// cached u block directly.
enum class DualUpdateMode { algorithm3, plain };

/// Which penalty the dual update consumes: the one scheduled for the next
/// outer iteration, or the one the inner solve just used.
enum class SigmaIndexMode { next, current };

enum class InnerSolver { newton, first_order };

struct SolverConfig {
  double sigma0 = 1.0;
  double sigma_growth = 1.5;
  double sigma_max = 1e6;
  Criterion criterion = Criterion::A;
  double eps0 = 0.5;          // eps_k = eps0 * 2^-k
  double delta0 = 0.5;        // delta_k = delta0 * 2^-k
  double delta_prime0 = 1.0;  // delta'_k = delta_prime0 * 2^-k
  EtaSchedule eta;
  double warm_start_tol = 0.5;
  int warm_start_cap = 5000;
  int max_outer = 100;
  int newton_cap = 50;
  int apg_cap = 100000;
  int first_order_inner_cap = 200000;
  double kkt_target = 1e-6;
  DualUpdateMode dual_mode = DualUpdateMode::algorithm3;
  SigmaIndexMode sigma_index = SigmaIndexMode::next;
  InnerSolver inner = InnerSolver::newton;

  void validate() const;
};

double eps_k(const SolverConfig& cfg, int k);
double delta_k(const SolverConfig& cfg, int k);
double delta_prime_k(const SolverConfig& cfg, int k);

/// Per-agent multiplier blocks: upper paired with the identity rows of the
/// stacked constraint operator, lower paired with the gossip rows.
struct DualState {
  BlockVec upper;
  BlockVec lower;
};

DualState zero_duals(int agents, int dim);

struct DualUpdateResult {
  DualState next;
  double delta_sq_norm = 0.0;
  int rounds_used = 0;
};

/// Multiplier step at x_new. Shares x (one round), forms both u blocks,
/// then applies
///   upper: -prox_conj(u_upper)
///   lower: algorithm3 mode shares u_lower once more and negates its
///          neighbor combination; plain mode negates u_lower directly.
/// Bills one reduction for the movement norm the criteria consume.
DualUpdateResult dual_update(const BlockVec& x_new, double sigma_used, const DualState& duals,
                             DualUpdateMode mode, const LocalObjective& obj,
                             const GossipMatrix& gossip, SyncNetwork& net);

/// Pure predicate over already-reduced quantities.
bool check_stop(Criterion criterion, double grad_phi_norm, double lambda_delta_norm, double sigma_k,
                int k, const SolverConfig& cfg, double mu);

/// Scaled KKT residual of the underlying problem at the stacked point:
/// consensus violation plus the fixed-point residual of the proximal
/// gradient map of the averaged problem. Centralized monitor; bills one
/// gather when a network is supplied.
double kkt_residual(const BlockVec& x, const LocalObjective& obj, const GossipMatrix& gossip,
                    SyncNetwork* net = nullptr);

struct OuterRecord {
  int iteration = 0;
  double r_kkt = 0.0;
  double grad_phi_norm = 0.0;
  double lambda_delta_norm = 0.0;
  double sigma = 0.0;
  double objective = 0.0;
  int inner_newton_iters = 0;
  long apg_iters = 0;
  long fallback_iters = 0;
  int warmstart_iters = 0;
  int warmstart_grad_evals = 0;
  long rounds = 0;      // ledger delta over this outer iteration
  long reduce_ops = 0;  // ledger delta over this outer iteration
  bool inner_capped = false;
};

struct SolveResult {
  BlockVec x;
  Eigen::VectorXd average;
  DualState duals;
  std::vector<OuterRecord> trace;
  bool converged = false;
  bool inner_flagged = false;
  double final_r_kkt = 0.0;
  int outer_iterations = 0;
  double objective = 0.0;
  CommLedger ledger;
};

using ProgressObserver = std::function<void(const OuterRecord&)>;

/// Outer augmented-Lagrangian loop: warm start once, inexact inner solves
/// until the configured criterion accepts, multiplier step, monotone
/// penalty growth; terminates on the KKT target or flags the cap.
SolveResult solve(const LocalObjective& obj, const GossipMatrix& gossip, SyncNetwork& net,
                  const SolverConfig& cfg, const ProgressObserver& progress = {});

}  // namespace dssnal
