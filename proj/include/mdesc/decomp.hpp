#pragma once

#include "mdesc/metric.hpp"
#include "mdesc/rng.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

namespace mdesc {

/// A partition of X into clusters of diameter < delta, with per-point padding
/// radii pi(x) = sup{r : B(x,r) inside the cluster of x} = d(x, X \ P(x)).
/// pi(x) is capped at delta when P(x) = X.
struct RandomPartition {
  double delta = 0.0;
  std::vector<int> cluster_of;
  std::vector<PointSet> clusters;
  std::vector<double> padding;
};

/// CKR-style random partition: radius r uniform in [delta/4, delta/2), a
/// uniformly random order of centers, and every point joins the first center
/// (in that order) within distance r.
RandomPartition padded_partition(const MetricSpace& m, double delta, Engine& engine);

/// Smallest alpha on the grid 2^(j/8), j >= 0, such that at every dyadic
/// delta (2^m for m in dyadic_scales extended by one) and every x, at least
/// half of `samples` partitions satisfy padding(x) >= delta / alpha.
double estimate_alpha(const MetricSpace& m, int samples, std::uint64_t seed);

/// Union of the clusters whose independent fair coin shows 0.
PointSet zero_set_from_partition(const RandomPartition& p, Engine& engine);

enum class ZeroSetKind { Partition, Arv };

/// A seeded sampler of random subsets Z of the ambient space. Draw i is a pure
/// function of (seed, i), so draws may be produced in any order or in parallel.
class ZeroSetDistribution {
 public:
  using Sampler = std::function<PointSet(Engine&)>;

  ZeroSetDistribution(ZeroSetKind kind, double delta, std::uint64_t seed, Sampler sampler)
      : kind_(kind), delta_(delta), seed_(seed), sampler_(std::move(sampler)) {}

  ZeroSetKind kind() const { return kind_; }
  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }

  PointSet draw(std::uint64_t index) const;
  std::vector<PointSet> draw_many(std::size_t count) const;

 private:
  ZeroSetKind kind_;
  double delta_;
  std::uint64_t seed_;
  Sampler sampler_;
};

/// Zero sets from padded partitions of the points in `support` (all points if
/// empty). Emitted indices are ambient.
ZeroSetDistribution partition_zero_sets(const MetricSpace& m, double delta, std::uint64_t seed,
                                        PointSet support = {});

struct ArvConfig {
  double sigma = 0.25;
  int directions = 128;
  /// Reweighting rounds; negative means ceil(log2 n).
  int rounds = -1;
  /// Pairs landing in L' x R' at least this often get their weight halved.
  double heavy_probability = 0.1;
};

/// Result of one hyperplane split of the ARV procedure (support-local indices).
struct ArvSplit {
  PointSet left;           // L_u
  PointSet right;          // R_u
  PointSet left_pruned;    // L'_u
  PointSet right_pruned;   // R'_u
  PointSet emitted;        // U
};

/// The reweighted hyperplane-rounding family for a negative-type metric at
/// scale delta. Construction runs the reweighting rounds; afterwards the
/// family is immutable and split() is a pure function.
class ArvFamily {
 public:
  ArvFamily(const MetricSpace& support_metric, double delta, const ArvConfig& config,
            std::uint64_t seed);

  int size() const { return n_; }
  double delta() const { return delta_; }
  /// f = T o g (truncation at sqrt(delta)), translated to mean zero.
  const PointConfig& image() const { return image_; }
  int weight_count() const { return static_cast<int>(weights_.size()); }
  /// Symmetric integer weights on pairs, row-major n x n.
  const std::vector<std::int64_t>& weights(int k) const { return weights_[k]; }
  double threshold() const { return threshold_; }
  double prune_distance() const { return prune_distance_; }
  /// Directions are drawn uniformly from S^(direction_dim - 1).
  int direction_dim() const { return direction_dim_; }
  bool separated_pairs_empty() const { return far_pairs_empty_; }

  Eigen::VectorXd random_direction(Engine& engine) const;
  ArvSplit split(int weight_index, const Eigen::VectorXd& direction) const;
  /// One draw from the family's distribution: uniform weight function,
  /// uniform direction.
  PointSet sample(Engine& engine) const;

 private:
  int n_ = 0;
  double delta_ = 0.0;
  MetricSpace metric_;
  PointConfig image_;
  double threshold_ = 0.0;
  double prune_distance_ = 0.0;
  int direction_dim_ = 1;
  bool far_pairs_empty_ = true;
  std::vector<std::pair<int, int>> close_pairs_;  // sorted by (distance, i, j)
  std::vector<std::vector<std::int64_t>> weights_;
};

/// ARV/CGR zero sets at scale delta on `support` (all points if empty).
/// Throws NotNegativeType when the support metric is not of negative type.
ZeroSetDistribution arv_zero_set_family(const MetricSpace& m, double delta, const ArvConfig& config,
                                        std::uint64_t seed, PointSet support = {});

/// Per-pair spreading measurement for the ordered pair (x, y).
struct PairSpreading {
  int x = 0;
  int y = 0;
  double distance = 0.0;
  /// Smallest zeta with empirical Pr[y in Z and d(x,Z) >= delta/zeta] >= p;
  /// +infinity when no zeta achieves it.
  double zeta = std::numeric_limits<double>::infinity();
  /// Empirical frequency of the event at that zeta (0 when zeta is infinite).
  double empirical_p = 0.0;
};

struct SpreadingEstimate {
  double zeta = std::numeric_limits<double>::infinity();
  double p = 0.0;
  int samples = 0;
  double delta = 0.0;
  std::vector<PairSpreading> pairs;
};

/// Measures zeta(X; p) at the distribution's scale from draws 0..samples-1.
/// Every ordered pair with d(x,y) >= delta is examined; zeta is their max.
SpreadingEstimate estimate_zeta(const MetricSpace& m, const ZeroSetDistribution& dist, double p,
                                int samples);

}  // namespace mdesc
