#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "dssnal/errors.hpp"
#include "dssnal/solver.hpp"

namespace dssnal {

struct Dataset {
  int n = 0;
  int S = 0;
  Eigen::MatrixXd features;  // n x S, columns are samples
  Eigen::VectorXd labels;    // S
  std::string provenance;
};

/// Sparse "label idx:val ..." text rows, feature ids 1-indexed, absent
/// entries zero. The dimension is the largest id seen unless overridden.
Dataset load_svmlight(const std::string& path, int dim_override = 0);
void save_svmlight(const Dataset& data, const std::string& path);

/// Dense comma-separated rows, label in the last column.
Dataset load_csv(const std::string& path);

/// Per-feature standardization to mean 0 and unit sample deviation
/// (S-1 denominator); constant features map to zero.
Dataset zscore(Dataset data);

/// Uniform labels on [0,1); standard-normal features min-max scaled to
/// [0,1] per sample with a 1e-10 range floor.
Dataset gen_random_regression(int n, int S, std::uint64_t seed);

/// Same feature recipe; labels split +1/-1 by a random hyperplane through
/// the median score, so classes are balanced.
Dataset gen_random_classification(int n, int S, std::uint64_t seed);

void write_trace_jsonl(const std::string& path, const std::vector<OuterRecord>& trace);
void write_solution_vector(const std::string& path, const Eigen::VectorXd& w);

struct RunSummary {
  std::string family;
  std::string solver;
  std::string topology;
  int m = 0;
  int n = 0;
  int S = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  bool inner_flagged = false;
  int outer_iterations = 0;
  long first_order_iterations = 0;  // warm start plus direction-solve iterations
  double r_kkt = 0.0;
  double objective = 0.0;
  long rounds = 0;
  long vectors_sent = 0;
  long reduce_ops = 0;
};

void write_summary_json(const std::string& path, const RunSummary& summary);

}  // namespace dssnal
