#include "dssnal/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dssnal {

double forcing_term(const EtaSchedule& schedule, int t, double grad_norm) {
  // Both schedules are floored: below ~1e-12 a residual certificate cannot
  // be distinguished from round-off.
  if (schedule.kind == EtaSchedule::Kind::geometric)
    return std::max(std::min(schedule.eta_bar, std::pow(0.5, t + 1)), 1e-12);
  return std::min(schedule.eta_bar, std::max(grad_norm, 1e-10));
}

DirectionResult newton_direction(Subproblem& sub, const JacobianSelections& sel,
                                 const Subproblem::Gradient& grad, double eta, int apg_cap) {
  DirectionResult result;
  const int m = sub.agents();
  if (grad.norm == 0.0) {
    result.d = zero_blocks(m, sub.dim());
    return result;
  }

  const double mu = sub.mu();
  const double L = sub.L();
  const double beta = momentum_coefficient(mu, L);
  result.budget = std::min(apg_iteration_budget(eta, mu, L), apg_cap);

  BlockVec d = zero_blocks(m, sub.dim());
  BlockVec d_prev = d;
  BlockVec d_tilde(static_cast<size_t>(m));
  for (int j = 0; j < result.budget; ++j) {
    for (size_t i = 0; i < d.size(); ++i) d_tilde[i] = d[i] + beta * (d[i] - d_prev[i]);
    const BlockVec md = sub.apply_generalized_hessian(sel, d_tilde);
    d_prev = std::move(d);
    d.resize(static_cast<size_t>(m));
    for (size_t i = 0; i < d.size(); ++i)
      d[i] = d_tilde[i] - (md[i] + grad.blocks[i]) / L;
  }

  // Certification: one extra matvec plus a reduction turns the theoretical
  // budget guarantee into a measured bound.
  const BlockVec md = sub.apply_generalized_hessian(sel, d);
  const double residual_sq = sub.network().reduce_sum([&](int i) {
    return (md[static_cast<size_t>(i)] + grad.blocks[static_cast<size_t>(i)]).squaredNorm();
  });
  result.residual_norm = std::sqrt(residual_sq);
  result.ratio = result.residual_norm / grad.norm;
  if (result.ratio > eta * (1.0 + 1e-12)) throw BudgetMissError(result.ratio, eta);
  result.d = std::move(d);
  return result;
}

NewtonStepRecord dissn_step(Subproblem& sub, BlockVec& x, Subproblem::Gradient& grad, double eta,
                            int apg_cap) {
  NewtonStepRecord record;
  record.eta = eta;
  record.grad_norm_before = grad.norm;

  const JacobianSelections sel = sub.freeze_selections();
  DirectionResult dir = newton_direction(sub, sel, grad, eta, apg_cap);
  record.budget = dir.budget;
  record.ratio = dir.ratio;

  for (size_t i = 0; i < x.size(); ++i) x[i] += dir.d[i];
  sub.refresh_u(x);
  grad = sub.grad_phi(x);
  return record;
}

namespace {

struct RecoveryOutcome {
  long spent = 0;      // two-round momentum iterations
  bool improved = false;
};

// Drives the gradient below the target with momentum iterations from the
// current point; leaves x, the caches and grad consistent at the last
// evaluated point. Bails out when a 300-iteration window improves the best
// gradient norm by less than 1%, which is the signature of the numerical
// floor rather than of slow progress.
RecoveryOutcome first_order_recovery(Subproblem& sub, BlockVec& x, Subproblem::Gradient& grad,
                                     double target_norm, int burst_cap) {
  constexpr int kWindow = 300;
  MomentumState state =
      make_momentum_state(sub.agents(), sub.dim(), momentum_coefficient(sub.mu(), sub.L()));
  state.x_curr = x;
  state.x_prev = x;

  RecoveryOutcome outcome;
  const double entry_norm = grad.norm;
  double best_seen = grad.norm;
  double window_anchor = grad.norm;
  for (int j = 0; j < burst_cap; ++j) {
    const ExtrapolatedEval eval = eval_extrapolated(state, sub);
    ++outcome.spent;
    best_seen = std::min(best_seen, eval.grad.norm);
    const bool hit = eval.grad.norm <= target_norm;
    const bool window_end = (j + 1) % kWindow == 0;
    const bool stagnant = window_end && best_seen > 0.99 * window_anchor;
    if (hit || stagnant || j + 1 == burst_cap) {
      x = eval.point;
      grad = eval.grad;
      outcome.improved = hit || best_seen <= entry_norm * (1.0 - 1e-3);
      return outcome;
    }
    if (window_end) window_anchor = best_seen;
    apply_gradient_step(state, eval, sub.L());
  }
  return outcome;
}

}  // namespace

InnerSolveStats dissn_solve(Subproblem& sub, BlockVec& x, const StopPredicate& stop,
                            const EtaSchedule& schedule, int newton_cap, int apg_cap,
                            const NewtonObserver& observer) {
  // Stall handling: no new best gradient norm for `patience` consecutive
  // steps means the iterate is outside the Newton basin (typically a cycle
  // across smooth pieces); recover by first-order iterations until the
  // gradient clears the best seen level by `decrease`.
  constexpr int kStallPatience = 2;
  constexpr double kRecoveryDecrease = 0.25;
  constexpr int kRecoveryBurstCap = 5000;

  InnerSolveStats stats;
  if (!sub.fresh_at(x)) sub.refresh_u(x);
  Subproblem::Gradient grad = sub.grad_phi(x);

  // A residual certificate below round-off resolution cannot pass; the
  // achievable relative residual scales with the conditioning.
  const double kappa = sub.L() / sub.mu();
  const double eta_floor =
      std::min(schedule.eta_bar, 100.0 * std::numeric_limits<double>::epsilon() * kappa);

  double best_norm = grad.norm;
  int stalled = 0;
  int hopeless = 0;  // consecutive recoveries that could not move the gradient
  for (int t = 0; t < newton_cap; ++t) {
    if (stop(grad.norm, x)) {
      stats.grad_norm = grad.norm;
      return stats;
    }
    const double eta = std::max(forcing_term(schedule, t, grad.norm), eta_floor);
    if (apg_iteration_budget(eta, sub.mu(), sub.L()) > apg_cap) {
      // The certified direction is out of budget; make first-order progress
      // instead of running an uncertifiable truncated solve.
      const RecoveryOutcome rec =
          first_order_recovery(sub, x, grad, 0.5 * grad.norm, kRecoveryBurstCap);
      stats.fallback_iterations += rec.spent;
      hopeless = rec.improved ? 0 : hopeless + 1;
      if (hopeless >= 2) break;  // at the numerical floor; flag, don't spin
      best_norm = std::min(best_norm, grad.norm);
      stalled = 0;
      continue;
    }
    const NewtonStepRecord record = dissn_step(sub, x, grad, eta, apg_cap);
    stats.records.push_back(record);
    stats.apg_iterations += record.budget;
    ++stats.newton_steps;
    if (observer) observer(t, x, record);

    if (grad.norm < best_norm * (1.0 - 1e-3)) {
      best_norm = grad.norm;
      stalled = 0;
      hopeless = 0;
    } else if (++stalled >= kStallPatience) {
      const RecoveryOutcome rec =
          first_order_recovery(sub, x, grad, kRecoveryDecrease * best_norm, kRecoveryBurstCap);
      stats.fallback_iterations += rec.spent;
      hopeless = rec.improved ? 0 : hopeless + 1;
      if (hopeless >= 2) break;
      best_norm = std::min(best_norm, grad.norm);
      stalled = 0;
    }
  }
  stats.grad_norm = grad.norm;
  stats.capped = !stop(grad.norm, x);
  return stats;
}

}  // namespace dssnal
