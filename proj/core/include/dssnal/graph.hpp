#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dssnal/errors.hpp"

namespace dssnal {

/// Undirected communication graph over agents 0..m-1. Construction rejects
/// self loops and out-of-range endpoints; connectivity is a queryable
/// property so that rejection sampling and negative tests can hold
/// disconnected graphs.
struct Graph {
  int m = 0;
  std::vector<std::pair<int, int>> edges;        // i < j, deduplicated, sorted
  std::vector<std::vector<int>> neighbors;       // sorted adjacency lists

  static Graph from_edges(int m, std::vector<std::pair<int, int>> edges);

  int degree(int i) const { return static_cast<int>(neighbors[static_cast<size_t>(i)].size()); }
  bool is_connected() const;
  bool are_adjacent(int i, int j) const;
};

Graph complete_graph(int m);
Graph ring_graph(int m);
Graph path_graph(int m);

/// Near-square 2D lattice on m nodes (rows = largest divisor of m not
/// exceeding sqrt(m); degenerates to a path when m is prime).
Graph grid_graph(int m);

/// Erdos-Renyi G(m, p), resampled until connected.
Graph erdos_renyi_graph(int m, double p, std::uint64_t seed);

/// Edge-list text file: agent count on line 1, then one 1-indexed "i j"
/// pair per line. Blank lines and lines starting with '#' are skipped.
Graph load_edge_list(const std::string& path);
void save_edge_list(const Graph& g, const std::string& path);

/// Topology ids accepted by the CLI: "complete", "ring", "path", "grid",
/// "er:<p>", "file:<path>".
Graph make_topology(const std::string& id, int m, std::uint64_t seed);

}  // namespace dssnal
