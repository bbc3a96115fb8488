#include "dssnal/graph.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace dssnal {

Graph Graph::from_edges(int m, std::vector<std::pair<int, int>> edges) {
  if (m < 1) throw TopologyError("agent count must be positive");
  std::set<std::pair<int, int>> unique;
  for (auto [a, b] : edges) {
    if (a == b) throw TopologyError("self loop on agent " + std::to_string(a));
    if (a < 0 || b < 0 || a >= m || b >= m) throw TopologyError("edge endpoint out of range");
    unique.insert({std::min(a, b), std::max(a, b)});
  }
  Graph g;
  g.m = m;
  g.edges.assign(unique.begin(), unique.end());
  g.neighbors.assign(static_cast<size_t>(m), {});
  for (auto [a, b] : g.edges) {
    g.neighbors[static_cast<size_t>(a)].push_back(b);
    g.neighbors[static_cast<size_t>(b)].push_back(a);
  }
  for (auto& list : g.neighbors) std::sort(list.begin(), list.end());
  return g;
}

bool Graph::is_connected() const {
  if (m == 0) return false;
  std::vector<char> seen(static_cast<size_t>(m), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : neighbors[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++visited;
        stack.push_back(w);
      }
    }
  }
  return visited == m;
}

bool Graph::are_adjacent(int i, int j) const {
  const auto& list = neighbors[static_cast<size_t>(i)];
  return std::binary_search(list.begin(), list.end(), j);
}

Graph complete_graph(int m) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) edges.emplace_back(i, j);
  return Graph::from_edges(m, std::move(edges));
}

Graph ring_graph(int m) {
  if (m < 3) throw TopologyError("ring needs at least 3 agents");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) edges.emplace_back(i, (i + 1) % m);
  return Graph::from_edges(m, std::move(edges));
}

Graph path_graph(int m) {
  if (m < 2) throw TopologyError("path needs at least 2 agents");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i + 1 < m; ++i) edges.emplace_back(i, i + 1);
  return Graph::from_edges(m, std::move(edges));
}

Graph grid_graph(int m) {
  if (m < 2) throw TopologyError("grid needs at least 2 agents");
  int rows = 1;
  for (int r = 1; r * r <= m; ++r)
    if (m % r == 0) rows = r;
  const int cols = m / rows;
  std::vector<std::pair<int, int>> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int id = r * cols + c;
      if (c + 1 < cols) edges.emplace_back(id, id + 1);
      if (r + 1 < rows) edges.emplace_back(id, id + cols);
    }
  }
  return Graph::from_edges(m, std::move(edges));
}

Graph erdos_renyi_graph(int m, double p, std::uint64_t seed) {
  if (m < 2) throw TopologyError("random graph needs at least 2 agents");
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("edge probability must be in (0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (coin(rng) < p) edges.emplace_back(i, j);
    Graph g = Graph::from_edges(m, std::move(edges));
    if (g.is_connected()) return g;
  }
  throw TopologyError("failed to sample a connected graph; raise p");
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open graph file " + path);
  std::string line;
  long lineno = 0;
  int m = -1;
  std::vector<std::pair<int, int>> edges;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    if (m < 0) {
      if (!(ss >> m) || m < 1) throw ParseError("expected agent count", lineno);
      continue;
    }
    int a = 0, b = 0;
    if (!(ss >> a >> b)) throw ParseError("expected edge 'i j'", lineno);
    if (a < 1 || b < 1 || a > m || b > m) throw ParseError("edge endpoint out of range", lineno);
    edges.emplace_back(a - 1, b - 1);
  }
  if (m < 0) throw ParseError("empty graph file " + path);
  return Graph::from_edges(m, std::move(edges));
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write graph file " + path);
  out << g.m << "\n";
  for (auto [a, b] : g.edges) out << a + 1 << " " << b + 1 << "\n";
}

Graph make_topology(const std::string& id, int m, std::uint64_t seed) {
  if (id == "complete") return complete_graph(m);
  if (id == "ring") return ring_graph(m);
  if (id == "path") return path_graph(m);
  if (id == "grid") return grid_graph(m);
  if (id.rfind("er:", 0) == 0) return erdos_renyi_graph(m, std::stod(id.substr(3)), seed);
  if (id.rfind("file:", 0) == 0) return load_edge_list(id.substr(5));
  throw ParameterError("unknown topology '" + id + "'");
}

}  // namespace dssnal
