#include "dssnal/apg.hpp"

#include <cmath>

namespace dssnal {

double momentum_coefficient(double mu, double L) {
  if (!(mu > 0.0) || !(L > 0.0) || mu > L)
    throw ParameterError("momentum coefficient needs 0 < mu <= L");
  const double sl = std::sqrt(L);
  const double sm = std::sqrt(mu);
  return (sl - sm) / (sl + sm);
}

int apg_iteration_budget(double eta, double mu, double L) {
  if (!(eta > 0.0) || eta >= 1.0) throw ParameterError("forcing term must lie in (0, 1)");
  if (!(mu > 0.0) || !(L > 0.0) || mu > L) throw ParameterError("budget needs 0 < mu <= L");
  if (mu == L) return 1;
  const double numerator = 2.0 * std::log(std::sqrt(2.0 * L / mu) / eta);
  const double denominator = std::log(1.0 / (1.0 - std::sqrt(mu / L)));
  const int budget = static_cast<int>(std::ceil(numerator / denominator));
  return budget > 1 ? budget : 1;
}

MomentumState make_momentum_state(int agents, int dim, double beta) {
  if (!(beta >= 0.0) || beta >= 1.0) throw ParameterError("momentum coefficient must lie in [0, 1)");
  MomentumState state;
  state.x_curr = zero_blocks(agents, dim);
  state.x_prev = zero_blocks(agents, dim);
  state.beta = beta;
  return state;
}

ExtrapolatedEval eval_extrapolated(const MomentumState& state, Subproblem& sub) {
  const size_t m = state.x_curr.size();
  ExtrapolatedEval eval;
  eval.point.resize(m);
  for (size_t i = 0; i < m; ++i)
    eval.point[i] = state.x_curr[i] + state.beta * (state.x_curr[i] - state.x_prev[i]);
  sub.refresh_u(eval.point);
  eval.grad = sub.grad_phi(eval.point);
  eval.point_sq_norm =
      sub.network().reduce_sum([&](int i) { return eval.point[static_cast<size_t>(i)].squaredNorm(); });
  return eval;
}

void apply_gradient_step(MomentumState& state, const ExtrapolatedEval& eval, double L) {
  const double step = 1.0 / L;
  for (size_t i = 0; i < state.x_curr.size(); ++i) {
    state.x_prev[i] = state.x_curr[i];
    state.x_curr[i] = eval.point[i] - step * eval.grad.blocks[i];
  }
  ++state.iterations;
}

void dapg_iterate(MomentumState& state, Subproblem& sub) {
  const ExtrapolatedEval eval = eval_extrapolated(state, sub);
  apply_gradient_step(state, eval, sub.L());
}

WarmStartResult warm_start(Subproblem& sub, double tol, int cap) {
  if (!(tol > 0.0)) throw ParameterError("warm-start tolerance must be positive");
  WarmStartResult result;
  if (std::isinf(tol)) {
    result.x = zero_blocks(sub.agents(), sub.dim());
    return result;
  }
  MomentumState state = make_momentum_state(sub.agents(), sub.dim(), momentum_coefficient(sub.mu(), sub.L()));
  for (int j = 0;; ++j) {
    const ExtrapolatedEval eval = eval_extrapolated(state, sub);
    ++result.grad_evals;
    result.scaled_grad_norm = eval.grad.norm / (1.0 + std::sqrt(eval.point_sq_norm));
    if (result.scaled_grad_norm <= tol) {
      result.x = eval.point;
      result.iterations = j;
      return result;
    }
    if (j >= cap) {
      result.x = eval.point;
      result.iterations = j;
      result.capped = true;
      return result;
    }
    apply_gradient_step(state, eval, sub.L());
  }
}

}  // namespace dssnal
