#include "dssnal/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

namespace dssnal {

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

Dataset load_svmlight(const std::string& path, int dim_override) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path);
  std::vector<double> labels;
  std::vector<std::map<int, double>> rows;
  int max_id = 0;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double label = 0.0;
    if (!(ss >> label)) throw ParseError("expected a numeric label", lineno);
    std::map<int, double> row;
    std::string tok;
    while (ss >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw ParseError("expected 'index:value', got '" + tok + "'", lineno);
      int id = 0;
      double value = 0.0;
      try {
        size_t used = 0;
        id = std::stoi(tok.substr(0, colon), &used);
        if (used != colon) throw std::invalid_argument(tok);
        value = std::stod(tok.substr(colon + 1), &used);
        if (used != tok.size() - colon - 1) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("malformed 'index:value' token '" + tok + "'", lineno);
      }
      if (id < 1) throw ParseError("feature ids are 1-indexed", lineno);
      max_id = std::max(max_id, id);
      row[id - 1] = value;
    }
    labels.push_back(label);
    rows.push_back(std::move(row));
  }
  if (labels.empty()) throw DataError("empty dataset " + path);

  Dataset data;
  data.S = static_cast<int>(labels.size());
  data.n = dim_override > 0 ? dim_override : max_id;
  if (data.n < max_id) throw DataError("dimension override below the largest feature id");
  if (data.n < 1) throw DataError("dataset has no features");
  data.features = Eigen::MatrixXd::Zero(data.n, data.S);
  data.labels = Eigen::VectorXd::Zero(data.S);
  for (int j = 0; j < data.S; ++j) {
    data.labels[j] = labels[static_cast<size_t>(j)];
    for (const auto& [id, value] : rows[static_cast<size_t>(j)]) data.features(id, j) = value;
  }
  if (!data.features.allFinite() || !data.labels.allFinite())
    throw DataError("dataset contains non-finite values");
  data.provenance = path;
  return data;
}

void save_svmlight(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write dataset " + path);
  for (int j = 0; j < data.S; ++j) {
    out << format_double(data.labels[j]);
    for (int r = 0; r < data.n; ++r) {
      const double v = data.features(r, j);
      if (v != 0.0) out << " " << r + 1 << ":" << format_double(v);
    }
    out << "\n";
  }
}

Dataset load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<double> row;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ParseError("malformed numeric cell '" + cell + "'", lineno);
      }
    }
    if (row.size() < 2) throw ParseError("need at least one feature and a trailing label", lineno);
    if (!rows.empty() && rows.front().size() != row.size())
      throw ParseError("ragged row width", lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("empty dataset " + path);
  Dataset data;
  data.S = static_cast<int>(rows.size());
  data.n = static_cast<int>(rows.front().size()) - 1;
  data.features.resize(data.n, data.S);
  data.labels.resize(data.S);
  for (int j = 0; j < data.S; ++j) {
    for (int r = 0; r < data.n; ++r) data.features(r, j) = rows[static_cast<size_t>(j)][static_cast<size_t>(r)];
    data.labels[j] = rows[static_cast<size_t>(j)].back();
  }
  if (!data.features.allFinite() || !data.labels.allFinite())
    throw DataError("dataset contains non-finite values");
  data.provenance = path;
  return data;
}

Dataset zscore(Dataset data) {
  if (data.S < 2) throw DataError("standardization needs at least two samples");
  for (int r = 0; r < data.n; ++r) {
    auto row = data.features.row(r);
    const double mean = row.mean();
    const double var = (row.array() - mean).square().sum() / static_cast<double>(data.S - 1);
    const double stddev = std::sqrt(var);
    if (stddev <= 1e-12)
      row.setZero();
    else
      row = (row.array() - mean) / stddev;
  }
  return data;
}

namespace {

Eigen::MatrixXd sample_scaled_features(int n, int S, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd A(n, S);
  for (int j = 0; j < S; ++j)
    for (int r = 0; r < n; ++r) A(r, j) = gauss(rng);
  for (int j = 0; j < S; ++j) {
    auto col = A.col(j);
    const double lo = col.minCoeff();
    const double range = std::max(col.maxCoeff() - lo, 1e-10);
    col = (col.array() - lo) / range;
  }
  return A;
}

}  // namespace

Dataset gen_random_regression(int n, int S, std::uint64_t seed) {
  if (n < 1 || S < 1) throw ParameterError("generator needs positive sizes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Dataset data;
  data.n = n;
  data.S = S;
  data.labels.resize(S);
  for (int j = 0; j < S; ++j) data.labels[j] = unif(rng);
  data.features = sample_scaled_features(n, S, rng);
  data.provenance = "gen:regression:" + std::to_string(seed);
  return data;
}

Dataset gen_random_classification(int n, int S, std::uint64_t seed) {
  if (n < 1 || S < 1) throw ParameterError("generator needs positive sizes");
  std::mt19937_64 rng(seed);
  Dataset data;
  data.n = n;
  data.S = S;
  data.features = sample_scaled_features(n, S, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd plane(n);
  for (int r = 0; r < n; ++r) plane[r] = gauss(rng);
  Eigen::VectorXd scores = data.features.transpose() * plane;
  std::vector<double> sorted(scores.data(), scores.data() + S);
  std::nth_element(sorted.begin(), sorted.begin() + S / 2, sorted.end());
  const double pivot = sorted[static_cast<size_t>(S / 2)];
  data.labels.resize(S);
  for (int j = 0; j < S; ++j) data.labels[j] = scores[j] > pivot ? 1.0 : -1.0;
  data.provenance = "gen:classification:" + std::to_string(seed);
  return data;
}

void write_trace_jsonl(const std::string& path, const std::vector<OuterRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write trace " + path);
  for (const OuterRecord& r : trace) {
    nlohmann::json row = {
        {"iteration", r.iteration},
        {"r_kkt", r.r_kkt},
        {"grad_phi_norm", r.grad_phi_norm},
        {"lambda_delta_norm", r.lambda_delta_norm},
        {"sigma", r.sigma},
        {"objective", r.objective},
        {"inner_newton_iters", r.inner_newton_iters},
        {"apg_iters", r.apg_iters},
        {"fallback_iters", r.fallback_iters},
        {"warmstart_iters", r.warmstart_iters},
        {"warmstart_grad_evals", r.warmstart_grad_evals},
        {"rounds", r.rounds},
        {"reduce_ops", r.reduce_ops},
        {"inner_capped", r.inner_capped},
    };
    out << row.dump() << "\n";
  }
}

void write_solution_vector(const std::string& path, const Eigen::VectorXd& w) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write solution " + path);
  for (Eigen::Index r = 0; r < w.size(); ++r) out << format_double(w[r]) << "\n";
}

void write_summary_json(const std::string& path, const RunSummary& s) {
  nlohmann::json j = {
      {"family", s.family},
      {"solver", s.solver},
      {"topology", s.topology},
      {"m", s.m},
      {"n", s.n},
      {"S", s.S},
      {"seed", s.seed},
      {"converged", s.converged},
      {"inner_flagged", s.inner_flagged},
      {"outer_iterations", s.outer_iterations},
      {"first_order_iterations", s.first_order_iterations},
      {"r_kkt", s.r_kkt},
      {"objective", s.objective},
      {"rounds", s.rounds},
      {"vectors_sent", s.vectors_sent},
      {"reduce_ops", s.reduce_ops},
  };
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write summary " + path);
  out << j.dump(2) << "\n";
}

}  // namespace dssnal
