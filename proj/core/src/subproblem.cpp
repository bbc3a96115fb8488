#include "dssnal/subproblem.hpp"

#include <cmath>

namespace dssnal {

PhiConstants phi_constants(const SmoothnessConstants& constants, double sigma,
                           const GossipMatrix& gossip) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  PhiConstants out;
  out.mu = constants.mu;
  out.L = constants.L_F + sigma * gossip.stack_operator_sq_norm();
  return out;
}

Subproblem::Subproblem(const LocalObjective& obj, const GossipMatrix& gossip, SyncNetwork& net,
                       double sigma, BlockVec lambda_upper, BlockVec lambda_lower)
    : obj_(obj),
      gossip_(gossip),
      net_(net),
      sigma_(sigma),
      lambda_upper_(std::move(lambda_upper)),
      lambda_lower_(std::move(lambda_lower)),
      constants_(phi_constants(obj.constants(), sigma, gossip)) {
  if (gossip_.size() != net_.agent_count() || gossip_.size() != obj_.agents())
    throw TopologyError("objective, gossip matrix and network disagree on the agent count");
  if (lambda_upper_.size() != static_cast<size_t>(agents()) ||
      lambda_lower_.size() != static_cast<size_t>(agents()))
    throw ParameterError("multiplier blocks must have one entry per agent");
}

void Subproblem::refresh_u(const BlockVec& x) {
  const int m = agents();
  if (x.size() != static_cast<size_t>(m)) throw ParameterError("x must have one block per agent");

  u_upper_.assign(static_cast<size_t>(m), Eigen::VectorXd());
  u_lower_.assign(static_cast<size_t>(m), Eigen::VectorXd());
  coupling_.assign(static_cast<size_t>(m), Eigen::VectorXd());

  // Round 1: share x; each agent forms both halves of its u.
  net_.exchange([&](int i) { return x[static_cast<size_t>(i)]; },
                [&](int i, const Inbox& inbox) {
                  const size_t ui = static_cast<size_t>(i);
                  Eigen::VectorXd wx = weighted_neighbor_sum(i, gossip_, [&](int k) -> const Eigen::VectorXd& {
                    return k == i ? x[ui] : inbox.at(k);
                  });
                  u_upper_[ui] = sigma_ * x[ui] - lambda_upper_[ui];
                  u_lower_[ui] = sigma_ * wx - lambda_lower_[ui];
                });

  // Round 2: share u_lower; each agent keeps the neighbor combination the
  // gradient assembly needs.
  net_.exchange([&](int i) { return u_lower_[static_cast<size_t>(i)]; },
                [&](int i, const Inbox& inbox) {
                  coupling_[static_cast<size_t>(i)] =
                      weighted_neighbor_sum(i, gossip_, [&](int k) -> const Eigen::VectorXd& {
                        return k == i ? u_lower_[static_cast<size_t>(i)] : inbox.at(k);
                      });
                });

  x_cached_ = x;
  fresh_ = true;
}

bool Subproblem::fresh_at(const BlockVec& x) const {
  if (!fresh_ || x.size() != x_cached_.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (x[i] != x_cached_[i]) return false;
  return true;
}

Subproblem::Gradient Subproblem::grad_phi(const BlockVec& x) const {
  if (!fresh_at(x)) throw StalenessError("gradient requested at a point the caches were not refreshed at");
  const int m = agents();
  Gradient g;
  g.blocks.resize(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const size_t ui = static_cast<size_t>(i);
    g.blocks[ui] = obj_.grad(i, x[ui]) + obj_.prox_conj(u_upper_[ui], sigma_) + coupling_[ui];
  }
  g.sq_norm = net_.reduce_sum([&](int i) { return g.blocks[static_cast<size_t>(i)].squaredNorm(); });
  g.norm = std::sqrt(g.sq_norm);
  return g;
}

JacobianSelections Subproblem::freeze_selections() const {
  if (!fresh_) throw StalenessError("selections requested before any refresh");
  const int m = agents();
  JacobianSelections sel;
  sel.curvature.resize(static_cast<size_t>(m));
  sel.prox_diag.resize(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    const size_t ui = static_cast<size_t>(i);
    sel.curvature[ui] = obj_.curvature_mask(i, x_cached_[ui]);
    sel.prox_diag[ui] = obj_.prox_conj_jacobian(u_upper_[ui], sigma_);
  }
  return sel;
}

BlockVec Subproblem::apply_generalized_hessian(const JacobianSelections& sel,
                                               const BlockVec& d) const {
  const int m = agents();
  if (d.size() != static_cast<size_t>(m)) throw ParameterError("direction must have one block per agent");

  BlockVec hat(static_cast<size_t>(m));
  // Round 1: share d, form the neighbor combination.
  net_.exchange([&](int i) { return d[static_cast<size_t>(i)]; },
                [&](int i, const Inbox& inbox) {
                  hat[static_cast<size_t>(i)] =
                      weighted_neighbor_sum(i, gossip_, [&](int k) -> const Eigen::VectorXd& {
                        return k == i ? d[static_cast<size_t>(i)] : inbox.at(k);
                      });
                });

  BlockVec out(static_cast<size_t>(m));
  // Round 2: share the combination, assemble the matvec.
  net_.exchange([&](int i) { return hat[static_cast<size_t>(i)]; },
                [&](int i, const Inbox& inbox) {
                  const size_t ui = static_cast<size_t>(i);
                  Eigen::VectorXd whd = weighted_neighbor_sum(i, gossip_, [&](int k) -> const Eigen::VectorXd& {
                    return k == i ? hat[ui] : inbox.at(k);
                  });
                  out[ui] = obj_.hess_matvec(i, sel.curvature[ui], d[ui]) +
                            sigma_ * (sel.prox_diag[ui] * d[ui].array()).matrix() + sigma_ * whd;
                });
  return out;
}

}  // namespace dssnal
