#include "mdesc/generate.hpp"

#include "mdesc/error.hpp"
#include "mdesc/rng.hpp"

#include <bit>
#include <cmath>
#include <limits>

namespace mdesc {
namespace {

void check_size(long long points) {
  if (points < 1) throw Error(ErrorKind::InvalidArgument, "size parameters must be >= 1");
  if (points > kMaxGeneratedPoints) {
    throw Error(ErrorKind::TooLarge, std::to_string(points) + " points exceeds the cap of " +
                                         std::to_string(kMaxGeneratedPoints));
  }
}

}  // namespace

Graph hypercube_graph(int d) {
  if (d < 0 || d > 12) throw Error(ErrorKind::TooLarge, "hypercube dimension out of range");
  Graph g{1 << d, {}};
  for (int x = 0; x < g.n; ++x) {
    for (int b = 0; b < d; ++b) {
      const int y = x ^ (1 << b);
      if (x < y) g.edges.push_back({x, y, 1.0});
    }
  }
  return g;
}

Graph cycle_graph(int n) {
  check_size(n);
  Graph g{n, {}};
  if (n == 2) {
    g.edges.push_back({0, 1, 1.0});
  } else if (n > 2) {
    for (int i = 0; i < n; ++i) g.edges.push_back({i, (i + 1) % n, 1.0});
  }
  return g;
}

Graph path_graph(int n) {
  check_size(n);
  Graph g{n, {}};
  for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1, 1.0});
  return g;
}

Graph grid_graph(int a, int b) {
  check_size(static_cast<long long>(a) * b);
  Graph g{a * b, {}};
  for (int r = 0; r < a; ++r) {
    for (int c = 0; c < b; ++c) {
      const int v = r * b + c;
      if (c + 1 < b) g.edges.push_back({v, v + 1, 1.0});
      if (r + 1 < a) g.edges.push_back({v, v + b, 1.0});
    }
  }
  return g;
}

Graph star_graph(int leaves) {
  check_size(leaves + 1);
  Graph g{leaves + 1, {}};
  for (int i = 1; i <= leaves; ++i) g.edges.push_back({0, i, 1.0});
  return g;
}

Graph complete_bipartite_graph(int a, int b) {
  check_size(static_cast<long long>(a) + b);
  Graph g{a + b, {}};
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < b; ++j) g.edges.push_back({i, a + j, 1.0});
  }
  return g;
}

MetricSpace shortest_path_metric(const Graph& g) {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(g.n, g.n, inf);
  for (int i = 0; i < g.n; ++i) d(i, i) = 0.0;
  for (const auto& e : g.edges) {
    d(e.u, e.v) = std::min(d(e.u, e.v), e.weight);
    d(e.v, e.u) = d(e.u, e.v);
  }
  for (int k = 0; k < g.n; ++k) {
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    }
  }
  if (!d.allFinite()) throw Error(ErrorKind::InvalidArgument, "graph is disconnected");
  return validate_metric(std::move(d));
}

MetricSpace hypercube(int d) {
  if (d < 0) throw Error(ErrorKind::InvalidArgument, "hypercube dimension must be >= 0");
  if (d > 12) throw Error(ErrorKind::TooLarge, "hypercube dimension out of range");
  const int n = 1 << d;
  Eigen::MatrixXd dist(n, n);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) dist(x, y) = std::popcount(static_cast<unsigned>(x ^ y));
  }
  return validate_metric(std::move(dist));
}

MetricSpace cycle(int n) { return shortest_path_metric(cycle_graph(n)); }
MetricSpace path(int n) { return shortest_path_metric(path_graph(n)); }
MetricSpace grid(int a, int b) { return shortest_path_metric(grid_graph(a, b)); }

MetricSpace random_l1(int n, int dim, std::uint64_t seed) {
  check_size(n);
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  Engine engine = make_engine(seed);
  Eigen::MatrixXd pts(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) pts(i, c) = uniform01(engine);
  }
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) d(i, j) = (pts.row(i) - pts.row(j)).lpNorm<1>();
  }
  return validate_metric(std::move(d), {}, {1e-12, false});
}

MetricSpace uniform(int n) {
  check_size(n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Ones(n, n);
  d.diagonal().setZero();
  return validate_metric(std::move(d));
}

MetricSpace generate(const std::string& kind, int a, int b, std::uint64_t seed) {
  if (kind == "hypercube") return hypercube(a);
  if (kind == "cycle") return cycle(a);
  if (kind == "path") return path(a);
  if (kind == "grid") return grid(a, b);
  if (kind == "random_l1") return random_l1(a, b, seed);
  if (kind == "uniform") return uniform(a);
  throw Error(ErrorKind::InvalidArgument, "unknown generator kind '" + kind + "'");
}

}  // namespace mdesc
