#pragma once

#include "mdesc/metric.hpp"

#include <Eigen/Dense>

#include <span>

namespace mdesc {

/// An explicit map X -> R^dim, one row per point of the source space,
/// together with the Lipschitz constant its construction guarantees.
class Embedding {
 public:
  Embedding() = default;
  Embedding(Eigen::MatrixXd coords, double lip_bound)
      : coords_(std::move(coords)), lip_bound_(lip_bound) {}

  /// The constant zero map on n points (dimension 0 unless requested).
  static Embedding zero(int n, int dim = 0) { return {Eigen::MatrixXd::Zero(n, dim), 0.0}; }

  int size() const { return static_cast<int>(coords_.rows()); }
  int dim() const { return static_cast<int>(coords_.cols()); }
  double lip_bound() const { return lip_bound_; }
  const Eigen::MatrixXd& coords() const { return coords_; }

  Eigen::VectorXd operator()(int x) const { return coords_.row(x).transpose(); }
  double distance(int x, int y) const { return (coords_.row(x) - coords_.row(y)).norm(); }

  /// factor * e; the Lipschitz bound scales by |factor|.
  Embedding scaled(double factor) const;

  PointConfig points() const { return {coords_}; }

 private:
  Eigen::MatrixXd coords_;
  double lip_bound_ = 0.0;
};

/// Direct sum (e_1 + ... + e_k) * scale. Lipschitz bound is
/// scale * sqrt(sum of squared bounds).
Embedding direct_sum(std::span<const Embedding> parts, double scale = 1.0);
Embedding direct_sum(const Embedding& a, const Embedding& b, double scale = 1.0);

/// Largest ||e(x) - e(y)|| / d(x,y) over pairs with d(x,y) > 0.
double measured_lipschitz(const MetricSpace& m, const Embedding& e);

/// Norm-tau re-embedding G with, for all pairs,
///   1/2 min(tau, |x-y|) <= |G(x) - G(y)| <= min(tau, |x-y|),  |G(x)| = tau.
///
/// Realized on the finite input set by the kernel
///   k(x,y) = tau^2/2 * (1 + exp(-|x-y|^2 / tau^2)),
/// i.e. a Gaussian feature map of norm tau/sqrt(2) plus one constant
/// coordinate tau/sqrt(2). Then |G(x)-G(y)|^2 = tau^2 (1 - exp(-r^2/tau^2)),
/// which lies between (1/4) min(tau,r)^2 and min(tau,r)^2.
/// Exact duplicates map to the same image. Bounds are re-verified on every
/// pair; throws KernelNotPSD when the factorization breaks them beyond
/// rounding.
PointConfig truncation_map(const PointConfig& points, double tau);

/// Applies truncation_map to the image of e; the result is 1-Lipschitz
/// whenever e is (times e's bound).
Embedding truncate(const Embedding& e, double tau);

}  // namespace mdesc
