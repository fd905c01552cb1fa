#pragma once

#include "mdesc/generate.hpp"
#include "mdesc/metric.hpp"
#include "mdesc/sdp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace mdesc {

/// Capacities w_N and demands w_D on pairs: symmetric, nonnegative, zero
/// diagonal, w_D not identically zero.
struct CutInstance {
  int n = 0;
  Eigen::MatrixXd w_n;
  Eigen::MatrixXd w_d;

  /// Vertices incident to a positive demand.
  PointSet demand_support() const;
};

/// Validates the weights. Throws InvalidArgument or ZeroDemand.
CutInstance make_cut_instance(Eigen::MatrixXd w_n, Eigen::MatrixXd w_d);

/// Unit capacities on the graph's edges (summed for parallel edges, weighted
/// by edge weight) and unit demand on every pair.
CutInstance uniform_demand_instance(const Graph& graph);

/// side[v] == 1 means v is in S.
using Cut = std::vector<char>;

struct CutWeights {
  double capacity = 0.0;
  double demand = 0.0;
};

/// Capacity and demand crossing S.
CutWeights cut_weights(const CutInstance& instance, const Cut& side);

/// Capacity / demand across S; +inf when no demand crosses (including 0/0,
/// which cut_weights exposes). Throws EmptyOrFullCut for S in {empty, V}.
double sparsity(const CutInstance& instance, const Cut& side);

struct BruteForceResult {
  Cut cut;
  double phi = 0.0;
};

/// Exact minimum over all proper cuts (n <= 24); ties go to the
/// lexicographically smallest S (sorted vertex list).
BruteForceResult brute_force_optimum(const CutInstance& instance);

struct RoundConfig {
  /// Sign vectors; 0 means ceil(20 log2 n).
  int directions = 0;
  SdpOptions sdp;
};

struct SweepCandidate {
  int direction = 0;
  /// Prefix length in the sorted order (1..n-1).
  int prefix = 0;
  double phi = 0.0;
  /// No demand crosses this prefix; skipped when choosing.
  bool degenerate = false;
};

struct RoundTrace {
  double sdp_value = 0.0;
  double epsilon = 0.0;
  /// Factor applied to f to make it 1-Lipschitz with respect to d*.
  double lipschitz_rescale = 1.0;
  int directions = 0;
  std::vector<SweepCandidate> candidates;
  /// Distortion of x -> (<beta_i, f(x)>)_i in l1 against d*, measured through
  /// the cut decomposition: largest expansion over all pairs divided by the
  /// smallest expansion over demand-support pairs.
  double lambda = 0.0;
  /// phi_alg / sdp_value <= lambda (1 + tol) re-checked on this run.
  bool accounting_holds = false;
};

struct RoundResult {
  Cut cut;
  double phi = 0.0;
  RoundTrace trace;
};

/// Solve the relaxation, embed (V, d*) with the min-distortion program on the
/// demand support, project on M random sign vectors, and return the sparsest
/// of the M(n-1) sweep cuts. Sweep ties break by vertex index.
RoundResult round_sdp(const CutInstance& instance, const RoundConfig& config, std::uint64_t seed);

struct WeightedCut {
  double alpha = 0.0;
  Cut side;
};

struct CutDecomposition {
  std::vector<WeightedCut> cuts;
};

/// Rows are points, columns line coordinates. Per coordinate, one cut per gap
/// between consecutive distinct sorted values (alpha = gap); the cuts
/// reconstruct the l1 distance exactly: |g(x) - g(y)|_1 = sum alpha_i
/// [S_i separates x, y].
CutDecomposition cut_decomposition(const Eigen::MatrixXd& points);

/// sum alpha_i over cuts separating x and y.
double decomposition_distance(const CutDecomposition& d, int x, int y);

}  // namespace mdesc
