#include "dssnal/solver.hpp"

#include <cmath>
#include <optional>

#include "dssnal/prox.hpp"
#include "dssnal/subproblem.hpp"

namespace dssnal {

void SolverConfig::validate() const {
  if (!(sigma0 > 0.0)) throw ParameterError("sigma0 must be positive");
  if (!(sigma_growth >= 1.0)) throw ParameterError("sigma growth factor must be at least 1");
  if (!(sigma_max >= sigma0)) throw ParameterError("sigma_max must dominate sigma0");
  if (!(eps0 > 0.0) || !(delta0 > 0.0) || !(delta_prime0 > 0.0))
    throw ParameterError("criterion sequences need positive leading terms");
  if (!(warm_start_tol > 0.0)) throw ParameterError("warm-start tolerance must be positive");
  if (max_outer < 1 || newton_cap < 1 || apg_cap < 1 || warm_start_cap < 0 ||
      first_order_inner_cap < 1)
    throw ParameterError("iteration caps must be positive");
  if (!(kkt_target > 0.0)) throw ParameterError("termination target must be positive");
}

double eps_k(const SolverConfig& cfg, int k) { return cfg.eps0 * std::pow(0.5, k); }
double delta_k(const SolverConfig& cfg, int k) { return cfg.delta0 * std::pow(0.5, k); }
double delta_prime_k(const SolverConfig& cfg, int k) { return cfg.delta_prime0 * std::pow(0.5, k); }

DualState zero_duals(int agents, int dim) {
  return DualState{zero_blocks(agents, dim), zero_blocks(agents, dim)};
}

DualUpdateResult dual_update(const BlockVec& x_new, double sigma_used, const DualState& duals,
                             DualUpdateMode mode, const LocalObjective& obj,
                             const GossipMatrix& gossip, SyncNetwork& net) {
  if (!(sigma_used > 0.0)) throw ParameterError("dual update needs a positive sigma");
  const int m = net.agent_count();
  BlockVec u_upper(static_cast<size_t>(m));
  BlockVec u_lower(static_cast<size_t>(m));

  DualUpdateResult result;
  result.next.upper.resize(static_cast<size_t>(m));
  result.next.lower.resize(static_cast<size_t>(m));

  // Round 1: share x, form both u blocks.
  net.exchange([&](int i) { return x_new[static_cast<size_t>(i)]; },
               [&](int i, const Inbox& inbox) {
                 const size_t ui = static_cast<size_t>(i);
                 Eigen::VectorXd wx = weighted_neighbor_sum(i, gossip, [&](int k) -> const Eigen::VectorXd& {
                   return k == i ? x_new[ui] : inbox.at(k);
                 });
                 u_upper[ui] = sigma_used * x_new[ui] - duals.upper[ui];
                 u_lower[ui] = sigma_used * wx - duals.lower[ui];
                 result.next.upper[ui] = -obj.prox_conj(u_upper[ui], sigma_used);
               });
  result.rounds_used = 1;

  if (mode == DualUpdateMode::algorithm3) {
    // Round 2: share u_lower; the new lower block is the negated neighbor
    // combination.
    net.exchange([&](int i) { return u_lower[static_cast<size_t>(i)]; },
                 [&](int i, const Inbox& inbox) {
                   const size_t ui = static_cast<size_t>(i);
                   result.next.lower[ui] =
                       -weighted_neighbor_sum(i, gossip, [&](int k) -> const Eigen::VectorXd& {
                         return k == i ? u_lower[ui] : inbox.at(k);
                       });
                 });
    result.rounds_used = 2;
  } else {
    for (int i = 0; i < m; ++i) result.next.lower[static_cast<size_t>(i)] = -u_lower[static_cast<size_t>(i)];
  }

  result.delta_sq_norm = net.reduce_sum([&](int i) {
    const size_t ui = static_cast<size_t>(i);
    return (result.next.upper[ui] - duals.upper[ui]).squaredNorm() +
           (result.next.lower[ui] - duals.lower[ui]).squaredNorm();
  });
  return result;
}

bool check_stop(Criterion criterion, double grad_phi_norm, double lambda_delta_norm, double sigma_k,
                int k, const SolverConfig& cfg, double mu) {
  const double grad_sq = grad_phi_norm * grad_phi_norm;
  const double delta_sq = lambda_delta_norm * lambda_delta_norm;
  const bool a = grad_sq <= eps_k(cfg, k) * eps_k(cfg, k) * mu / sigma_k;
  const bool b = grad_sq <= delta_k(cfg, k) * delta_k(cfg, k) * mu / sigma_k * delta_sq;
  const bool c = grad_phi_norm <= delta_prime_k(cfg, k) / sigma_k * lambda_delta_norm;
  switch (criterion) {
    case Criterion::A: return a;
    case Criterion::B: return b;
    case Criterion::C: return c;
    case Criterion::combined: return a && b && c;
  }
  return false;
}

double kkt_residual(const BlockVec& x, const LocalObjective& obj, const GossipMatrix& gossip,
                    SyncNetwork* net) {
  if (net) net->bill_monitor_gather();
  const int m = obj.agents();
  const int n = obj.dim();

  Eigen::VectorXd avg_grad = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) avg_grad += obj.grad(i, x[static_cast<size_t>(i)]);
  avg_grad /= static_cast<double>(m);

  const Threshold tau = obj.prox_level();
  double consensus_sq = 0.0;
  double fixed_point_sq = 0.0;
  double point_sq = 0.0;
  for (int i = 0; i < m; ++i) {
    const size_t ui = static_cast<size_t>(i);
    const Eigen::VectorXd wx = weighted_neighbor_sum(
        i, gossip, [&](int k) -> const Eigen::VectorXd& { return x[static_cast<size_t>(k)]; });
    consensus_sq += wx.squaredNorm();
    fixed_point_sq += (x[ui] - prox_l1(x[ui] - avg_grad, tau)).squaredNorm();
    point_sq += x[ui].squaredNorm();
  }
  return (std::sqrt(consensus_sq) + std::sqrt(fixed_point_sq)) / (1.0 + std::sqrt(point_sq));
}

namespace {

struct FirstOrderInnerStats {
  long iterations = 0;
  double grad_norm = 0.0;
  bool capped = false;
};

FirstOrderInnerStats first_order_solve(Subproblem& sub, BlockVec& x, const StopPredicate& stop,
                                       int cap) {
  FirstOrderInnerStats stats;
  MomentumState state = make_momentum_state(sub.agents(), sub.dim(),
                                            momentum_coefficient(sub.mu(), sub.L()));
  state.x_curr = x;
  state.x_prev = x;
  for (long j = 0;; ++j) {
    const ExtrapolatedEval eval = eval_extrapolated(state, sub);
    stats.grad_norm = eval.grad.norm;
    if (stop(eval.grad.norm, eval.point)) {
      x = eval.point;
      stats.iterations = j;
      return stats;
    }
    if (j >= cap) {
      x = eval.point;
      stats.iterations = j;
      stats.capped = true;
      return stats;
    }
    apply_gradient_step(state, eval, sub.L());
  }
}

}  // namespace

SolveResult solve(const LocalObjective& obj, const GossipMatrix& gossip, SyncNetwork& net,
                  const SolverConfig& cfg, const ProgressObserver& progress) {
  cfg.validate();
  const int m = obj.agents();
  const int n = obj.dim();

  SolveResult result;
  result.x = zero_blocks(m, n);
  result.duals = zero_duals(m, n);

  // Penalties beyond this make the inner conditioning so poor that no
  // direction can be certified within the iteration budget; growing sigma
  // further only destabilizes the multiplier updates.
  constexpr double kappa_ceiling = 1e7;
  const double sigma_ceiling = std::max(
      cfg.sigma0, (kappa_ceiling * obj.constants().mu - obj.constants().L_F) /
                      gossip.stack_operator_sq_norm());
  const double sigma_limit = std::min(cfg.sigma_max, sigma_ceiling);

  double sigma = cfg.sigma0;
  for (int k = 0; k < cfg.max_outer; ++k) {
    const CommLedger before = net.ledger();
    OuterRecord record;
    record.iteration = k;
    record.sigma = sigma;

    Subproblem sub(obj, gossip, net, sigma, result.duals.upper, result.duals.lower);

    if (k == 0 && cfg.inner == InnerSolver::newton) {
      const WarmStartResult ws = warm_start(sub, cfg.warm_start_tol, cfg.warm_start_cap);
      result.x = ws.x;
      record.warmstart_iters = ws.iterations;
      record.warmstart_grad_evals = ws.grad_evals;
      record.inner_capped = ws.capped;
    }

    const double sigma_next = std::min(cfg.sigma_max, cfg.sigma_growth * sigma);
    const double sigma_for_dual = cfg.sigma_index == SigmaIndexMode::next ? sigma_next : sigma;

    std::optional<DualUpdateResult> accepted_dual;
    const bool needs_dual_candidate = cfg.criterion != Criterion::A;
    StopPredicate stop = [&](double grad_norm, const BlockVec& candidate) {
      double delta_norm = 0.0;
      std::optional<DualUpdateResult> trial;
      if (needs_dual_candidate) {
        trial = dual_update(candidate, sigma_for_dual, result.duals, cfg.dual_mode, obj, gossip, net);
        delta_norm = std::sqrt(trial->delta_sq_norm);
      }
      const bool accept = check_stop(cfg.criterion, grad_norm, delta_norm, sigma, k, cfg, obj.constants().mu);
      if (accept && trial)
        accepted_dual = std::move(trial);
      else
        accepted_dual.reset();
      if (accept) record.lambda_delta_norm = delta_norm;
      return accept;
    };

    if (cfg.inner == InnerSolver::newton) {
      const InnerSolveStats stats =
          dissn_solve(sub, result.x, stop, cfg.eta, cfg.newton_cap, cfg.apg_cap);
      record.inner_newton_iters = stats.newton_steps;
      record.apg_iters = stats.apg_iterations;
      record.fallback_iters = stats.fallback_iterations;
      record.grad_phi_norm = stats.grad_norm;
      record.inner_capped = record.inner_capped || stats.capped;
    } else {
      const FirstOrderInnerStats stats =
          first_order_solve(sub, result.x, stop, cfg.first_order_inner_cap);
      record.apg_iters = stats.iterations;
      record.grad_phi_norm = stats.grad_norm;
      record.inner_capped = record.inner_capped || stats.capped;
    }
    result.inner_flagged = result.inner_flagged || record.inner_capped;

    DualUpdateResult dual = accepted_dual
                                ? std::move(*accepted_dual)
                                : dual_update(result.x, sigma_for_dual, result.duals, cfg.dual_mode,
                                              obj, gossip, net);
    record.lambda_delta_norm = std::sqrt(dual.delta_sq_norm);
    result.duals = std::move(dual.next);

    record.r_kkt = kkt_residual(result.x, obj, gossip, &net);
    record.objective = problem_objective(obj, block_average(result.x));

    const CommLedger after = net.ledger();
    record.rounds = after.rounds - before.rounds;
    record.reduce_ops = after.reduce_ops - before.reduce_ops;
    result.trace.push_back(record);
    if (progress) progress(record);

    result.final_r_kkt = record.r_kkt;
    result.objective = record.objective;
    result.outer_iterations = k + 1;
    if (record.r_kkt < cfg.kkt_target) {
      result.converged = true;
      break;
    }
    sigma = sigma_next;
  }

  result.average = block_average(result.x);
  result.ledger = net.ledger();
  return result;
}

}  // namespace dssnal
