#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mdesc {

/// Sorted list of point indices.
using PointSet = std::vector<int>;

/// {0, ..., n-1}
PointSet all_points(int n);

struct ValidationOptions {
  /// Absolute slack for symmetry and triangle checks; 0 means exact.
  double tol = 0.0;
  /// Accept d(i,j) = 0 for i != j (pseudometrics produced by SDP solutions).
  bool allow_coincident = false;
};

/// A finite metric space on points 0..n-1. Immutable once constructed; the
/// only way to obtain one is through validate_metric, so every instance
/// satisfies the metric axioms.
class MetricSpace {
 public:
  MetricSpace() = default;

  int size() const { return static_cast<int>(d_.rows()); }
  double operator()(int i, int j) const { return d_(i, j); }
  const Eigen::MatrixXd& matrix() const { return d_; }
  const std::vector<std::string>& labels() const { return labels_; }

  double diameter() const { return diameter_; }
  /// Smallest positive distance; 0 when n < 2 or every pair coincides.
  double min_positive_distance() const { return min_positive_; }

  /// d(x, S); +infinity for empty S.
  double distance_to_set(int x, std::span<const int> set) const;

  /// Restriction to `subset` (re-indexed 0..|subset|-1 in the given order).
  MetricSpace restricted(std::span<const int> subset) const;

  /// Same space with every distance multiplied by factor > 0.
  MetricSpace scaled(double factor) const;

 private:
  friend MetricSpace validate_metric(Eigen::MatrixXd, std::vector<std::string>,
                                     const ValidationOptions&);
  MetricSpace(Eigen::MatrixXd d, std::vector<std::string> labels);

  Eigen::MatrixXd d_;
  std::vector<std::string> labels_;
  double diameter_ = 0.0;
  double min_positive_ = 0.0;
};

/// Checks the metric axioms and returns the space, or throws Error naming the
/// first violated constraint (NotSquare, NegativeEntry, NonzeroDiagonal,
/// AsymmetricMatrix, CoincidentPoints, TriangleViolation(i,j,k) meaning
/// d(i,j) > d(i,k) + d(k,j)).
MetricSpace validate_metric(Eigen::MatrixXd matrix, std::vector<std::string> labels = {},
                            const ValidationOptions& options = {});

/// Euclidean point configuration, one row per point.
struct PointConfig {
  Eigen::MatrixXd coords;

  int size() const { return static_cast<int>(coords.rows()); }
  int dim() const { return static_cast<int>(coords.cols()); }
  double distance(int i, int j) const { return (coords.row(i) - coords.row(j)).norm(); }
  double squared_distance(int i, int j) const {
    return (coords.row(i) - coords.row(j)).squaredNorm();
  }
};

struct NegativeTypeVerdict {
  bool is_negative_type = true;
  /// Most negative eigenvalue of -1/2 J D J.
  double min_eigenvalue = 0.0;
  /// Empty when negative type; otherwise c with sum c = 0 and c^T D c > 0.
  Eigen::VectorXd witness;
};

/// Default eigenvalue tolerance: 1e-9 times the largest distance.
double default_negative_type_tol(const MetricSpace& m);

/// Schoenberg test: (X, sqrt d) is Euclidean iff -1/2 J D J is PSD.
/// A negative `tol` selects default_negative_type_tol.
NegativeTypeVerdict is_negative_type(const MetricSpace& m, double tol = -1.0);

/// Points g(i) with ||g(i) - g(j)||^2 = d(i,j) (classical MDS on D itself).
/// Throws NotNegativeType when the centered matrix has an eigenvalue below -tol.
PointConfig sqrt_embedding(const MetricSpace& m, double tol = -1.0);

/// Closed ball {y : d(x,y) <= r}, sorted.
PointSet ball(const MetricSpace& m, int x, double r);
int ball_size(const MetricSpace& m, int x, double r);

/// Sum over k of log2(|B(x, 2^(k+a))| / |B(x, 2^k)|), k running from the
/// largest 2^k below the minimum positive distance to the smallest 2^k above
/// the diameter.
double growth_sum(const MetricSpace& m, int x, int a);

/// Inclusive integer range [m_min, m_max].
struct ScaleRange {
  int lo = 0;
  int hi = -1;
  bool empty() const { return hi < lo; }
  int count() const { return empty() ? 0 : hi - lo + 1; }
};

/// Minimal [m_min, m_max] with every positive distance in [2^m_min, 2^(m_max+1)].
/// Empty range when the space has no positive distance.
ScaleRange dyadic_scales(const MetricSpace& m);

/// floor(log2 x) and ceil(log2 x), exact for positive finite doubles.
int floor_log2(double x);
int ceil_log2(double x);
/// ceil(log2 n) for a count n >= 1.
int ceil_log2(int n);

}  // namespace mdesc
