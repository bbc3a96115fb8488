#pragma once

#include "dssnal/blockvec.hpp"
#include "dssnal/subproblem.hpp"

namespace dssnal {

/// (sqrt(L) - sqrt(mu)) / (sqrt(L) + sqrt(mu)); requires 0 < mu <= L.
double momentum_coefficient(double mu, double L);

/// Number of constant-momentum iterations that provably drives the relative
/// residual of the quadratic model below eta:
///   ceil( 2 ln((1/eta) sqrt(2L/mu)) / ln(1/(1 - sqrt(mu/L))) ).
/// mu == L bypasses the formula (single iteration).
int apg_iteration_budget(double eta, double mu, double L);

/// Accelerated iterate pair for one agent-blocked variable; x_prev lags
/// x_curr by exactly one iteration.
struct MomentumState {
  BlockVec x_curr;
  BlockVec x_prev;
  double beta = 0.0;
  long iterations = 0;
};

MomentumState make_momentum_state(int agents, int dim, double beta);

/// Gradient data at the extrapolated point of one momentum iteration.
struct ExtrapolatedEval {
  BlockVec point;
  Subproblem::Gradient grad;
  double point_sq_norm = 0.0;
};

/// Extrapolates, refreshes the subproblem caches at the extrapolated point
/// (two exchange rounds) and evaluates the gradient there plus the point
/// norm (two reductions).
ExtrapolatedEval eval_extrapolated(const MomentumState& state, Subproblem& sub);

/// x <- point - (1/L) grad; purely local.
void apply_gradient_step(MomentumState& state, const ExtrapolatedEval& eval, double L);

/// One full accelerated step on the inner objective: two exchange rounds.
void dapg_iterate(MomentumState& state, Subproblem& sub);

struct WarmStartResult {
  BlockVec x;
  int iterations = 0;   // momentum steps actually applied
  int grad_evals = 0;   // gradient probes billed (two rounds each)
  double scaled_grad_norm = 0.0;
  bool capped = false;
};

/// Runs accelerated iterations from zero until
/// ||grad|| / (1 + ||x||) <= tol, checking before each step so an
/// already-converged start costs zero steps. An infinite tol skips all
/// communication. The returned point is the one whose probe passed, and the
/// subproblem caches are left fresh at it.
WarmStartResult warm_start(Subproblem& sub, double tol, int cap);

}  // namespace dssnal
