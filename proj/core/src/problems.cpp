#include "dssnal/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace dssnal {

std::vector<std::vector<int>> contiguous_partition(int samples, int agents) {
  if (agents < 1) throw ParameterError("agent count must be positive");
  std::vector<std::vector<int>> parts(static_cast<size_t>(agents));
  const int base = samples / agents;
  const int extra = samples % agents;
  int next = 0;
  for (int i = 0; i < agents; ++i) {
    const int count = base + (i < extra ? 1 : 0);
    auto& part = parts[static_cast<size_t>(i)];
    part.resize(static_cast<size_t>(count));
    std::iota(part.begin(), part.end(), next);
    next += count;
  }
  return parts;
}

std::vector<std::vector<int>> random_partition(int samples, int agents, std::uint64_t seed) {
  std::vector<int> ids(static_cast<size_t>(samples));
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  auto parts = contiguous_partition(samples, agents);
  for (auto& part : parts)
    for (int& j : part) j = ids[static_cast<size_t>(j)];
  for (auto& part : parts) std::sort(part.begin(), part.end());
  return parts;
}

void ProblemInstance::validate() const {
  if (n < 1 || agents < 1) throw DataError("instance needs positive dimension and agent count");
  if (features.rows() != n || features.cols() != samples || labels.size() != samples)
    throw DataError("feature/label shapes do not match the declared sizes");
  if (!features.allFinite() || !labels.allFinite()) throw DataError("non-finite data");
  if (!(params.rho > 0.0)) throw ParameterError("rho must be positive");
  if (params.gamma < 0.0) throw ParameterError("gamma must be nonnegative");
  if (family == Family::huber && !(params.nu > 0.0)) throw ParameterError("nu must be positive");
  if (family == Family::svc && !(params.C > 0.0)) throw ParameterError("C must be positive");
  if (partition.size() != static_cast<size_t>(agents)) throw DataError("partition size != agent count");
  std::vector<char> seen(static_cast<size_t>(samples), 0);
  for (const auto& part : partition) {
    for (int j : part) {
      if (j < 0 || j >= samples) throw DataError("partition index out of range");
      if (seen[static_cast<size_t>(j)]) throw DataError("partition assigns a sample twice");
      seen[static_cast<size_t>(j)] = 1;
    }
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw DataError("partition does not cover every sample");
  if (family == Family::svc) {
    for (Eigen::Index j = 0; j < labels.size(); ++j)
      if (labels[j] != 1.0 && labels[j] != -1.0)
        throw DataError("classification labels must be -1 or +1");
  }
}

double gram_lambda_max_upper(const Eigen::MatrixXd& features, const std::vector<int>& sample_ids) {
  if (sample_ids.empty()) return 0.0;
  const Eigen::Index n = features.rows();

  auto gram_apply = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int j : sample_ids) {
      const auto a = features.col(j);
      out += a.dot(v) * a;
    }
    return out;
  };

  Eigen::VectorXd v(n);
  for (Eigen::Index k = 0; k < n; ++k) v[k] = 1.0 + 0.01 * static_cast<double>(k % 7);
  v.normalize();

  double estimate = 0.0;
  bool converged = false;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd gv = gram_apply(v);
    const double rayleigh = v.dot(gv);
    const double norm = gv.norm();
    if (norm == 0.0) return 0.0;  // all selected samples orthogonal to v: treat as rank deficient
    v = gv / norm;
    if (it > 0 && std::abs(rayleigh - estimate) <= 1e-6 * std::max(1.0, std::abs(rayleigh))) {
      estimate = rayleigh;
      converged = true;
      break;
    }
    estimate = rayleigh;
  }
  if (!converged || !std::isfinite(estimate)) {
    double frob = 0.0;
    for (int j : sample_ids) frob += features.col(j).squaredNorm();
    return frob;
  }
  // Rayleigh quotients approach the top eigenvalue from below; a hair of
  // headroom keeps the smoothness bound an upper bound.
  return estimate * (1.0 + 1e-9);
}

SmoothnessConstants smoothness_constants(const ProblemInstance& instance) {
  SmoothnessConstants out;
  const int m = instance.agents;
  out.mu_i.resize(static_cast<size_t>(m));
  out.L_i.resize(static_cast<size_t>(m));
  const double ridge = instance.params.rho / m;
  for (int i = 0; i < m; ++i) {
    const double lam = gram_lambda_max_upper(instance.features, instance.partition[static_cast<size_t>(i)]);
    const double data_term = instance.family == Family::huber ? lam / instance.params.nu
                                                              : 2.0 * instance.params.C * lam;
    out.mu_i[static_cast<size_t>(i)] = ridge;
    out.L_i[static_cast<size_t>(i)] = ridge + data_term;
  }
  out.mu = *std::min_element(out.mu_i.begin(), out.mu_i.end());
  out.L_F = *std::max_element(out.L_i.begin(), out.L_i.end());
  return out;
}

LocalObjective::LocalObjective(ProblemInstance instance) : instance_(std::move(instance)) {
  constants_ = smoothness_constants(instance_);
}

Eigen::VectorXd LocalObjective::prox_conj(const Eigen::VectorXd& u, double /*sigma*/) const {
  return prox_l1_conjugate(u, prox_level());
}

Eigen::ArrayXd LocalObjective::prox_conj_jacobian(const Eigen::VectorXd& u, double /*sigma*/) const {
  const Threshold tau = prox_level();
  Eigen::ArrayXd mask(u.size());
  for (Eigen::Index r = 0; r < u.size(); ++r) mask[r] = clip_jacobian(u[r], tau);
  return mask;
}

HuberObjective::HuberObjective(ProblemInstance instance) : LocalObjective(std::move(instance)) {
  if (instance_.family != Family::huber)
    throw FamilyMismatchError("huber oracles invoked on a non-huber instance");
}

Eigen::VectorXd HuberObjective::grad(int i, const Eigen::VectorXd& w) const {
  const double nu = instance_.params.nu;
  const Threshold clip_at(nu);
  Eigen::VectorXd g = ridge_weight() * w;
  for (int j : samples_of(i)) {
    const auto a = instance_.features.col(j);
    const double r = a.dot(w) - instance_.labels[j];
    g += (clip(r, clip_at) / nu) * a;
  }
  return g;
}

Eigen::ArrayXd HuberObjective::curvature_mask(int i, const Eigen::VectorXd& w) const {
  const auto& ids = samples_of(i);
  const Threshold clip_at(instance_.params.nu);
  Eigen::ArrayXd mask(static_cast<Eigen::Index>(ids.size()));
  for (size_t s = 0; s < ids.size(); ++s) {
    const auto a = instance_.features.col(ids[s]);
    mask[static_cast<Eigen::Index>(s)] = clip_jacobian(a.dot(w) - instance_.labels[ids[s]], clip_at);
  }
  return mask;
}

Eigen::VectorXd HuberObjective::hess_matvec(int i, const Eigen::ArrayXd& mask,
                                            const Eigen::VectorXd& d) const {
  const auto& ids = samples_of(i);
  if (mask.size() != static_cast<Eigen::Index>(ids.size()))
    throw ParameterError("curvature mask size does not match the agent's sample count");
  const double nu = instance_.params.nu;
  Eigen::VectorXd out = ridge_weight() * d;
  for (size_t s = 0; s < ids.size(); ++s) {
    if (mask[static_cast<Eigen::Index>(s)] == 0.0) continue;
    const auto a = instance_.features.col(ids[s]);
    out += (mask[static_cast<Eigen::Index>(s)] / nu) * a.dot(d) * a;
  }
  return out;
}

double HuberObjective::local_value(int i, const Eigen::VectorXd& w) const {
  const double nu = instance_.params.nu;
  double value = 0.5 * ridge_weight() * w.squaredNorm();
  for (int j : samples_of(i)) {
    const double r = instance_.features.col(j).dot(w) - instance_.labels[j];
    const double a = std::abs(r);
    value += a <= nu ? r * r / (2.0 * nu) : a - 0.5 * nu;
  }
  return value;
}

SvcObjective::SvcObjective(ProblemInstance instance) : LocalObjective(std::move(instance)) {
  if (instance_.family != Family::svc)
    throw FamilyMismatchError("svc oracles invoked on a non-svc instance");
  for (Eigen::Index j = 0; j < instance_.labels.size(); ++j)
    if (instance_.labels[j] != 1.0 && instance_.labels[j] != -1.0)
      throw DataError("classification labels must be -1 or +1");
}

Eigen::VectorXd SvcObjective::grad(int i, const Eigen::VectorXd& w) const {
  const double C = instance_.params.C;
  Eigen::VectorXd g = ridge_weight() * w;
  for (int j : samples_of(i)) {
    const auto a = instance_.features.col(j);
    const double b = instance_.labels[j];
    const double margin = 1.0 - b * a.dot(w);
    if (margin > 0.0) g -= 2.0 * C * margin * b * a;
  }
  return g;
}

Eigen::ArrayXd SvcObjective::curvature_mask(int i, const Eigen::VectorXd& w) const {
  const auto& ids = samples_of(i);
  Eigen::ArrayXd mask(static_cast<Eigen::Index>(ids.size()));
  for (size_t s = 0; s < ids.size(); ++s) {
    const auto a = instance_.features.col(ids[s]);
    mask[static_cast<Eigen::Index>(s)] = relu_jacobian(1.0 - instance_.labels[ids[s]] * a.dot(w));
  }
  return mask;
}

Eigen::VectorXd SvcObjective::hess_matvec(int i, const Eigen::ArrayXd& mask,
                                          const Eigen::VectorXd& d) const {
  const auto& ids = samples_of(i);
  if (mask.size() != static_cast<Eigen::Index>(ids.size()))
    throw ParameterError("curvature mask size does not match the agent's sample count");
  const double C = instance_.params.C;
  Eigen::VectorXd out = ridge_weight() * d;
  for (size_t s = 0; s < ids.size(); ++s) {
    if (mask[static_cast<Eigen::Index>(s)] == 0.0) continue;
    const auto a = instance_.features.col(ids[s]);
    out += 2.0 * C * mask[static_cast<Eigen::Index>(s)] * a.dot(d) * a;
  }
  return out;
}

double SvcObjective::local_value(int i, const Eigen::VectorXd& w) const {
  const double C = instance_.params.C;
  double value = 0.5 * ridge_weight() * w.squaredNorm();
  for (int j : samples_of(i)) {
    const double margin = 1.0 - instance_.labels[j] * instance_.features.col(j).dot(w);
    if (margin > 0.0) value += C * margin * margin;
  }
  return value;
}

std::unique_ptr<LocalObjective> make_objective(ProblemInstance instance) {
  instance.validate();
  if (instance.family == Family::huber) return std::make_unique<HuberObjective>(std::move(instance));
  return std::make_unique<SvcObjective>(std::move(instance));
}

double problem_objective(const LocalObjective& obj, const Eigen::VectorXd& w) {
  double value = obj.instance().params.gamma * w.lpNorm<1>();
  for (int i = 0; i < obj.agents(); ++i) value += obj.local_value(i, w);
  return value;
}

}  // namespace dssnal
