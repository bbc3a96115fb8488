#include "dssnal/prox.hpp"

#include <cmath>

namespace dssnal {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

Threshold::Threshold(double level) : tau(level) {
  require_finite(level, "threshold");
  if (level < 0.0) throw ParameterError("threshold must be nonnegative");
}

double clip(double t, Threshold tau) {
  require_finite(t, "clip input");
  const double a = std::abs(t);
  const double c = a < tau.tau ? a : tau.tau;
  return t < 0.0 ? -c : c;
}

double clip_jacobian(double t, Threshold tau) {
  require_finite(t, "clip_jacobian input");
  return std::abs(t) < tau.tau ? 1.0 : 0.0;
}

double relu_jacobian(double t) {
  require_finite(t, "relu_jacobian input");
  return t > 0.0 ? 1.0 : 0.0;
}

Eigen::VectorXd prox_l1_conjugate(const Eigen::VectorXd& v, Threshold tau) {
  if (!v.allFinite()) throw DomainError("prox_l1_conjugate input must be finite");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = clip(v[j], tau);
  return out;
}

Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, Threshold tau) {
  if (!v.allFinite()) throw DomainError("prox_l1 input must be finite");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double a = std::abs(v[j]) - tau.tau;
    out[j] = a > 0.0 ? (v[j] < 0.0 ? -a : a) : 0.0;
  }
  return out;
}

}  // namespace dssnal
