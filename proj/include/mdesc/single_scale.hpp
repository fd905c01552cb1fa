#pragma once

#include "mdesc/decomp.hpp"
#include "mdesc/embedding.hpp"
#include "mdesc/metric.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace mdesc {

/// Coordinate t is d(x, Z_t)/sqrt(T) for draws Z_0..Z_{T-1} of `dist`, with
/// d(x, empty) = diam. 1-Lipschitz.
Embedding frechet_map(const MetricSpace& m, const ZeroSetDistribution& dist, int samples);

/// h = (phi + d(., S)) / sqrt(2). Throws EmptySet for empty S.
Embedding neighborhood_extend(const MetricSpace& m, const Embedding& phi, const PointSet& s);

struct ProviderConfig {
  ZeroSetKind kind = ZeroSetKind::Arv;
  /// Zero sets per single-scale map.
  int zero_set_samples = 32;
  ArvConfig arv;
};

/// Supplies phi_{S,tau}: a 1-Lipschitz map of all of X built from random zero
/// sets on S at scale tau. Each map is a pure function of (seed, S, tau), so
/// the internal cache never changes results. Thread-safe.
class SingleScaleProvider {
 public:
  SingleScaleProvider(const MetricSpace& m, ProviderConfig config, std::uint64_t seed);

  const MetricSpace& metric() const { return metric_; }
  const ProviderConfig& config() const { return config_; }

  Embedding map(const PointSet& s, double tau) const;

 private:
  MetricSpace metric_;
  ProviderConfig config_;
  std::uint64_t seed_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<PointSet, double>, Embedding> cache_;
};

/// gamma_{U,k}: T uniformly random subsets S of U with |S| = min(|U|, k), each
/// contributing (phi_{S,tau/2} + d(., S))/sqrt(2), concatenated with 1/sqrt(T).
Embedding gamma_map(const MetricSpace& m, const PointSet& u, int k, double tau,
                    const SingleScaleProvider& provider, int samples, std::uint64_t seed);

struct LambdaConfig {
  /// Outer samples (random partitions).
  int samples = 200;
  /// Random subsets per gamma map.
  int gamma_samples = 4;
};

/// Lambda_{tau,k}: per sample a padded partition at D = 4 tau alpha_hat,
/// rho(z) = min(1, d(z, X \ P(z))/tau), and z -> rho(z)/2 * G_tau(gamma_{P(z),k}(z)).
/// Samples are concatenated with 1/sqrt(T). Every row has norm <= tau/2.
Embedding lambda_map(const MetricSpace& m, double tau, int k, double alpha_hat,
                     const SingleScaleProvider& provider, const LambdaConfig& config,
                     std::uint64_t seed);

/// Per sample and t = 1..ceil(log2 n), W_t keeps each point with
/// probability 2^-t and g_t = min(d(x, W_t), tau/4) (tau/4 when W_t is
/// empty); f = (g_1 + ... )/sqrt(ceil(log2 n)); samples concatenated with
/// 1/sqrt(T).
Embedding small_ratio_map(const MetricSpace& m, double tau, int samples, std::uint64_t seed);

struct SmallRatioEvents {
  double tau = 0.0;
  double lambda = 0.0;
  /// Points with |B(x,tau)| <= lambda |B(x,tau/2)|.
  PointSet members;
  /// Per member: chosen t with 2^t <= |B(x,tau/2)| (clamped to [1, ceil log2 n]).
  std::vector<int> t;
  std::vector<double> p_far;    // Pr[d(x,W_t) >= tau/4]
  std::vector<double> p_close;  // Pr[d(x,W_t) <= tau/8]
  /// min over members of min(p_far, p_close); 1 when there are no members.
  double epsilon = 1.0;
};

/// Measures the far/close events on the same W_t draws small_ratio_map uses.
SmallRatioEvents small_ratio_events(const MetricSpace& m, double tau, double lambda, int samples,
                                    std::uint64_t seed);

}  // namespace mdesc
