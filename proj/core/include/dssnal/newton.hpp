#pragma once

#include <functional>
#include <vector>

#include "dssnal/apg.hpp"
#include "dssnal/subproblem.hpp"

namespace dssnal {

/// Forcing-term schedule for the inexact Newton direction. The geometric
/// schedule halves a cap of eta_bar each step; the gradient schedule ties
/// the term to the current gradient norm, which upgrades the local rate
/// from superlinear to quadratic.
struct EtaSchedule {
  enum class Kind { geometric, gradient };
  Kind kind = Kind::geometric;
  double eta_bar = 0.5;
};

double forcing_term(const EtaSchedule& schedule, int t, double grad_norm);

struct DirectionResult {
  BlockVec d;
  int budget = 0;          // momentum iterations actually run
  double residual_norm = 0.0;
  double ratio = 0.0;      // residual relative to the gradient norm
};

/// Runs exactly the budgeted number of constant-momentum iterations on the
/// quadratic model (two exchange rounds each), then certifies the direction
/// with one extra matvec and reduction. A certificate miss is a thrown
/// error carrying the measured ratio: the budget is sufficient by
/// construction, so a miss signals broken constants, not bad luck.
DirectionResult newton_direction(Subproblem& sub, const JacobianSelections& sel,
                                 const Subproblem::Gradient& grad, double eta, int apg_cap);

struct NewtonStepRecord {
  double eta = 0.0;
  int budget = 0;
  double ratio = 0.0;
  double grad_norm_before = 0.0;
};

/// One unit Newton step (no line search): freeze selections, solve for the
/// direction, move, refresh the caches and gradient at the new point.
NewtonStepRecord dissn_step(Subproblem& sub, BlockVec& x, Subproblem::Gradient& grad, double eta,
                            int apg_cap);

struct InnerSolveStats {
  int newton_steps = 0;
  long apg_iterations = 0;
  long fallback_iterations = 0;  // first-order recovery steps (two rounds each)
  double grad_norm = 0.0;
  bool capped = false;
  std::vector<NewtonStepRecord> records;
};

using StopPredicate = std::function<bool(double grad_norm, const BlockVec& x)>;
using NewtonObserver = std::function<void(int t, const BlockVec& x, const NewtonStepRecord&)>;

/// Inexact Newton loop: evaluates the stop predicate before every step, so
/// an already-satisfied start costs zero steps. Refreshes the caches at
/// entry only when they are not already fresh at x (a warm start leaves
/// them fresh).
///
/// Unit steps converge only from inside the local basin, and the basin
/// shrinks as the penalty grows; when two consecutive steps produce no new
/// best gradient norm the loop falls back to the globally convergent
/// first-order recursion until the gradient drops well below the stall
/// level, then resumes Newton steps. The cap flags the result rather than
/// throwing.
InnerSolveStats dissn_solve(Subproblem& sub, BlockVec& x, const StopPredicate& stop,
                            const EtaSchedule& schedule, int newton_cap, int apg_cap,
                            const NewtonObserver& observer = {});

}  // namespace dssnal
