#pragma once

#include <Eigen/Core>
#include <vector>

namespace dssnal {

/// Stacked per-agent storage: one n-vector per agent. Agent code owns and
/// touches only its own block; whole-vector views exist for monitors and
/// test oracles.
using BlockVec = std::vector<Eigen::VectorXd>;

inline BlockVec zero_blocks(int agents, int dim) {
  return BlockVec(static_cast<size_t>(agents), Eigen::VectorXd::Zero(dim));
}

inline Eigen::VectorXd stack_blocks(const BlockVec& v) {
  if (v.empty()) return {};
  const Eigen::Index n = v.front().size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()) * n);
  for (size_t i = 0; i < v.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * n, n) = v[i];
  return out;
}

inline BlockVec split_blocks(const Eigen::VectorXd& stacked, int agents) {
  const Eigen::Index n = stacked.size() / agents;
  BlockVec out(static_cast<size_t>(agents));
  for (int i = 0; i < agents; ++i) out[static_cast<size_t>(i)] = stacked.segment(i * n, n);
  return out;
}

inline Eigen::VectorXd block_average(const BlockVec& v) {
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(v.front().size());
  for (const auto& b : v) avg += b;
  return avg / static_cast<double>(v.size());
}

}  // namespace dssnal
