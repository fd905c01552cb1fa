#pragma once

#include "mdesc/embedding.hpp"
#include "mdesc/metric.hpp"
#include "mdesc/single_scale.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace mdesc {

struct GlueConfig {
  double A = 1.0;
  double B = 1.0;
};

/// Lipschitz constant of the glued map is at most
/// kGlueConstant * sqrt(log2 n * log2(4AB)).
/// Per (t,m) summand <= 3 d(x,y); at most 2 ceil(log2 8AB) scales are active
/// for a pair at each of the ceil(log2 n) levels t, so
/// lip <= sqrt(18 ceil(log2 n) ceil(log2 8AB)) <= 8.49 sqrt(log2 n log2 4AB).
inline constexpr double kGlueConstant = 9.0;

double glue_lip_bound(int n, const GlueConfig& config);

/// Piecewise-linear bump: 0 on [0, 1/2B], slope 2B up to 1 at 1/B, 1 on
/// [1/B, 2A], linear down to 0 at 4A, 0 beyond.
double bump(double r, const GlueConfig& config);

/// R(x,t) = sup{R : |B(x,R)| <= 2^t}; +infinity once 2^t >= n.
double growth_radius(const MetricSpace& m, int x, int t);

/// Levels t used by the glue: 0 .. ceil(log2 n) - 1.
int glue_levels(int n);

/// Scales m for which glue accepts maps: the dyadic range widened by
/// ceil(log2(4AB)) on both sides.
ScaleRange glue_scale_range(const MetricSpace& m, const GlueConfig& config);

/// Number of levels t with rho(R(x,t)/2^m) == 1.
int glue_active_count(const MetricSpace& m, int x, int scale, const GlueConfig& config);

/// psi_t = sum over m of rho(R(x,t)/2^m) * G_{2^m/B}(phi_m(x)); output is
/// psi_0 + ... + psi_{L-1}. Scales without an entry in `maps` use the zero map
/// (whose truncation is a constant vector of norm 2^m/B). Blocks that vanish
/// on every point are omitted. Throws ScaleRangeMismatch when a map has the
/// wrong point count or a scale outside glue_scale_range.
Embedding glue(const MetricSpace& m, const std::map<int, Embedding>& maps,
               const GlueConfig& config);

/// S_tau(K) = {x : |B(x, 8 tau alpha)| <= K |B(x, tau / (12 C (log2 K)^eps))|}.
PointSet s_tau_K(const MetricSpace& m, double tau, double K, double C, double eps,
                 double alpha_hat);

struct DistortionReport {
  double lip = 0.0;
  double colip = 0.0;
  double distortion = 1.0;
  int lip_x = -1, lip_y = -1;
  int colip_x = -1, colip_y = -1;
};

/// Exact scan over all pairs. A pair with equal images gives colip = +inf
/// (no throw).
DistortionReport distortion_report(const MetricSpace& m, const Embedding& e);

/// As distortion_report, but throws NonInjective when two points share an
/// image.
DistortionReport evaluate_distortion(const MetricSpace& m, const Embedding& e);

struct PipelineConfig {
  /// Samples per random map (lambda partitions, small-ratio draws).
  int samples = 200;
  int gamma_samples = 4;
  double C = 1.0;
  double eps = 0.5;
  /// Used instead of estimate_alpha when positive.
  double alpha_override = 0.0;
  int alpha_samples = 200;
  /// Pairs checked against the ensemble's declared lower bound.
  int audit_pairs = 32;
};

struct StageReport {
  /// 0..N-1 for the gluing stages, N for the small-ratio stage.
  int stage = 0;
  /// K_j (0 for the small-ratio stage).
  double K = 0.0;
  int dim = 0;
  double lip = 0.0;
  double colip = 0.0;
  double distortion = 0.0;
};

struct PipelineResult {
  Embedding embedding;
  double alpha_hat = 1.0;
  std::vector<double> K;
  std::vector<StageReport> stages;
  DistortionReport total;
  /// Ensemble audit failures (warning level).
  std::vector<std::string> warnings;
};

/// K_0 = n, K_{j+1} = sqrt(K_j) while K_j >= 4; stage j glues
/// lambda_map(2^m, max(2, floor K_j)) over the dyadic scales with A = 4 alpha,
/// B = 12 C (log2 K_j)^eps. A final stage concatenates small_ratio_map(2^m)
/// over the same scales. The direct sum is divided by its measured Lipschitz
/// constant.
PipelineResult full_embedding(const MetricSpace& m, const SingleScaleProvider& ensemble,
                              const PipelineConfig& config, std::uint64_t seed);

}  // namespace mdesc
