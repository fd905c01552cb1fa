#pragma once

#include "mdesc/metric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mdesc {

/// Undirected graph with nonnegative edge weights.
struct Graph {
  struct Edge {
    int u = 0;
    int v = 0;
    double weight = 1.0;
  };
  int n = 0;
  std::vector<Edge> edges;
};

/// Instances are capped at this many points.
inline constexpr int kMaxGeneratedPoints = 4096;

Graph hypercube_graph(int d);
Graph cycle_graph(int n);
Graph path_graph(int n);
Graph grid_graph(int a, int b);
Graph star_graph(int leaves);
Graph complete_bipartite_graph(int a, int b);

/// All-pairs shortest paths (Floyd-Warshall); graph must be connected.
MetricSpace shortest_path_metric(const Graph& g);

/// Hamming metric on {0,1}^d.
MetricSpace hypercube(int d);
MetricSpace cycle(int n);
MetricSpace path(int n);
MetricSpace grid(int a, int b);
/// l1 distances between n uniform points in [0,1]^dim.
MetricSpace random_l1(int n, int dim, std::uint64_t seed);
/// All distances 1.
MetricSpace uniform(int n);

/// Generator by name: "hypercube", "cycle", "path", "grid", "random_l1",
/// "uniform". Unused size parameters are ignored.
MetricSpace generate(const std::string& kind, int a, int b, std::uint64_t seed);

}  // namespace mdesc
