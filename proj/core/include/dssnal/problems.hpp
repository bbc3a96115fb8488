#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <vector>

#include "dssnal/errors.hpp"
#include "dssnal/prox.hpp"

namespace dssnal {

enum class Family { huber, svc };

struct ProblemParams {
  double rho = 1.0;    // ridge weight, split as rho/m per agent
  double gamma = 0.0;  // l1 weight, split as gamma/m per agent
  double nu = 1.0;     // huber transition width
  double C = 1.0;      // squared-hinge weight
};

enum class PartitionKind { contiguous, random };

std::vector<std::vector<int>> contiguous_partition(int samples, int agents);
std::vector<std::vector<int>> random_partition(int samples, int agents, std::uint64_t seed);

/// One partitioned learning problem: columns of `features` are samples,
/// partition[i] lists the sample indices held by agent i.
struct ProblemInstance {
  Family family = Family::huber;
  int n = 0;
  int agents = 0;
  int samples = 0;
  Eigen::MatrixXd features;  // n x samples
  Eigen::VectorXd labels;    // samples
  std::vector<std::vector<int>> partition;
  ProblemParams params;

  /// Throws DataError / ParameterError on any violated invariant
  /// (partition not a disjoint cover, nonpositive rho, bad labels, ...).
  void validate() const;
};

struct SmoothnessConstants {
  double mu = 0.0;   // min over agents
  double L_F = 0.0;  // max over agents
  std::vector<double> mu_i;
  std::vector<double> L_i;
};

/// Upper bound on the top eigenvalue of the Gram operator of the selected
/// sample columns: 50 power iterations with a deterministic start, falling
/// back to the Frobenius bound if the iteration stalls.
double gram_lambda_max_upper(const Eigen::MatrixXd& features, const std::vector<int>& sample_ids);

SmoothnessConstants smoothness_constants(const ProblemInstance& instance);

/// Per-agent oracles of one problem family: smooth-part gradient and
/// generalized-Hessian matvec (matrix free, against a selection frozen at
/// one point), plus the shared l1 conjugate-prox pair. All methods are pure
/// with respect to the instance and safe to call concurrently.
class LocalObjective {
 public:
  virtual ~LocalObjective() = default;

  const ProblemInstance& instance() const { return instance_; }
  int agents() const { return instance_.agents; }
  int dim() const { return instance_.n; }
  double mu_i(int i) const { return constants_.mu_i[static_cast<size_t>(i)]; }
  double L_i(int i) const { return constants_.L_i[static_cast<size_t>(i)]; }
  const SmoothnessConstants& constants() const { return constants_; }

  virtual Eigen::VectorXd grad(int i, const Eigen::VectorXd& w) const = 0;

  /// Per-sample curvature weights in {0,1} at w, one entry per sample of
  /// agent i, in partition order. Freezing this array fixes the Hessian
  /// selection for a whole direction solve.
  virtual Eigen::ArrayXd curvature_mask(int i, const Eigen::VectorXd& w) const = 0;

  virtual Eigen::VectorXd hess_matvec(int i, const Eigen::ArrayXd& mask,
                                      const Eigen::VectorXd& d) const = 0;

  /// Smooth local cost f_i(w), used for objective reporting.
  virtual double local_value(int i, const Eigen::VectorXd& w) const = 0;

  /// Clip level gamma/m of the per-agent l1 term.
  Threshold prox_level() const { return Threshold(instance_.params.gamma / instance_.agents); }

  /// Proximal map of the scaled conjugate of the l1 term; constant in sigma.
  Eigen::VectorXd prox_conj(const Eigen::VectorXd& u, double sigma) const;
  /// Diagonal {0,1} generalized derivative of prox_conj at u.
  Eigen::ArrayXd prox_conj_jacobian(const Eigen::VectorXd& u, double sigma) const;

 protected:
  explicit LocalObjective(ProblemInstance instance);

  const std::vector<int>& samples_of(int i) const {
    return instance_.partition[static_cast<size_t>(i)];
  }
  double ridge_weight() const { return instance_.params.rho / instance_.agents; }

  ProblemInstance instance_;
  SmoothnessConstants constants_;
};

class HuberObjective : public LocalObjective {
 public:
  explicit HuberObjective(ProblemInstance instance);

  Eigen::VectorXd grad(int i, const Eigen::VectorXd& w) const override;
  Eigen::ArrayXd curvature_mask(int i, const Eigen::VectorXd& w) const override;
  Eigen::VectorXd hess_matvec(int i, const Eigen::ArrayXd& mask,
                              const Eigen::VectorXd& d) const override;
  double local_value(int i, const Eigen::VectorXd& w) const override;
};

class SvcObjective : public LocalObjective {
 public:
  explicit SvcObjective(ProblemInstance instance);

  Eigen::VectorXd grad(int i, const Eigen::VectorXd& w) const override;
  Eigen::ArrayXd curvature_mask(int i, const Eigen::VectorXd& w) const override;
  Eigen::VectorXd hess_matvec(int i, const Eigen::ArrayXd& mask,
                              const Eigen::VectorXd& d) const override;
  double local_value(int i, const Eigen::VectorXd& w) const override;
};

std::unique_ptr<LocalObjective> make_objective(ProblemInstance instance);

/// Total objective of the underlying problem at a single shared point:
/// sum of f_i(w) plus gamma * ||w||_1.
double problem_objective(const LocalObjective& obj, const Eigen::VectorXd& w);

}  // namespace dssnal
