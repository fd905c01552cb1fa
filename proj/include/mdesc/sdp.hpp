#pragma once

#include "mdesc/embedding.hpp"
#include "mdesc/metric.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <vector>

namespace mdesc {

/// coef * G(i,j); for i != j the entry is counted once (G is symmetric).
struct GramTerm {
  int i = 0;
  int j = 0;
  double coef = 0.0;
};

/// lower <= sum of terms + scalar_coef * s <= upper.
struct SdpConstraint {
  std::vector<GramTerm> terms;
  double scalar_coef = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

SdpConstraint sdp_equal(std::vector<GramTerm> terms, double rhs, double scalar_coef = 0.0);
SdpConstraint sdp_at_most(std::vector<GramTerm> terms, double rhs, double scalar_coef = 0.0);
SdpConstraint sdp_at_least(std::vector<GramTerm> terms, double rhs, double scalar_coef = 0.0);

/// Terms of |x_u - x_v|^2 = G(u,u) + G(v,v) - 2 G(u,v), scaled by coef.
std::vector<GramTerm> squared_distance_terms(int u, int v, double coef = 1.0);

/// maximize objective(G) + objective_scalar * s over PSD G (n x n) and, when
/// has_scalar, one free real s.
struct SdpProblem {
  int n = 0;
  bool has_scalar = false;
  std::vector<GramTerm> objective;
  double objective_scalar = 0.0;
  std::vector<SdpConstraint> constraints;
};

enum class SdpStatus { Optimal, MaxIterations, Infeasible };
std::string to_string(SdpStatus status);

struct SdpSolution {
  Eigen::MatrixXd gram;
  double scalar = 0.0;
  /// Rows of the factorization G = P P^T (eigenvalues below 1e-9 trace dropped).
  PointConfig points;
  double objective_value = 0.0;
  /// Dual bound on the objective (an upper bound for this maximization, up
  /// to residuals).
  double dual_bound = 0.0;
  SdpStatus status = SdpStatus::MaxIterations;
  int iterations = 0;
  /// Largest constraint violation of (gram, scalar), in the problem's units.
  double max_violation = 0.0;
  double min_eigenvalue = 0.0;
};

/// Warm start: primal vector and duals from a previous solve of a problem
/// with a prefix of the current constraints.
struct SdpWarmStart {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
  Eigen::VectorXd y;
};

struct SdpOptions {
  double tol = 1e-6;
  int max_iter = 50000;
};

/// ADMM on the augmented Lagrangian: exact primal minimization (cached
/// Cholesky), projection onto box x PSD by eigendecomposition, dual ascent,
/// adaptive penalty. Deterministic. Status Infeasible when a dual ray
/// certificate appears.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {},
                  SdpWarmStart* warm = nullptr);

/// Factor a PSD Gram matrix; eigenvalues below 1e-9 * trace are dropped.
PointConfig factor_gram(const Eigen::MatrixXd& gram);

struct MinDistortionResult {
  /// Map of all of Y; 1-Lipschitz up to solver tolerance.
  Embedding embedding;
  double epsilon = 0.0;
  /// 1/sqrt(epsilon).
  double distortion = std::numeric_limits<double>::infinity();
  SdpSolution solution;
};

/// max eps s.t. |x_u - x_v|^2 <= d(u,v)^2 on Y and >= eps d(u,v)^2 on X.
/// An empty subset means X = Y. Throws Infeasible / MaxIterations
/// (the latter only when the returned iterate is unusable).
MinDistortionResult min_distortion_embedding(const MetricSpace& y, const PointSet& subset = {},
                                             const SdpOptions& options = {});

struct CutInstance;

struct SparsestCutRelaxation {
  /// d*(u,v) = |x_u - x_v|^2; coincident points allowed.
  MetricSpace metric;
  PointConfig points;
  double value = 0.0;
  int rounds = 0;
  int triangle_constraints = 0;
  SdpSolution solution;
};

/// min sum w_N |x_u - x_v|^2 s.t. sum w_D |x_u - x_v|^2 = 1 (ordered pairs),
/// triangle inequalities on squared distances (added lazily, worst 5n per
/// round, at most 20 rounds), G PSD. Throws ZeroDemand.
SparsestCutRelaxation sparsest_cut_relaxation(const CutInstance& instance,
                                              const SdpOptions& options = {});

}  // namespace mdesc
