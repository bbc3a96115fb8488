#pragma once

#include <Eigen/Core>

#include "dssnal/errors.hpp"

namespace dssnal {

/// Nonnegative clip level for the scalar kernels below.
struct Threshold {
  double tau;

  explicit Threshold(double level);
};

/// sgn(t) * min(|t|, tau). Odd, 1-Lipschitz, bounded by tau.
double clip(double t, Threshold tau);

/// A fixed element of the clip map's generalized derivative at t:
/// 1 strictly inside the band, 0 strictly outside, 0 on the boundary.
double clip_jacobian(double t, Threshold tau);

/// A fixed element of the generalized derivative of max(0, t):
/// 1 for t > 0, 0 for t < 0, 0 at t = 0.
double relu_jacobian(double t);

/// Componentwise clip at tau: the projection onto the inf-norm ball of
/// radius tau. Equals the proximal map of the conjugate of tau*||.||_1
/// under any positive scaling, so no scale parameter appears.
Eigen::VectorXd prox_l1_conjugate(const Eigen::VectorXd& v, Threshold tau);

/// Componentwise soft threshold: sgn(v) * max(|v| - tau, 0).
Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, Threshold tau);

}  // namespace dssnal
