#include "mdesc/single_scale.hpp"

#include "mdesc/error.hpp"
#include "mdesc/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace mdesc {

namespace {

constexpr std::size_t kProviderCacheLimit = 4096;

// W_1..W_L for one sample, W_t keeping each point with probability 2^-t
std::vector<std::vector<char>> draw_nets(int n, int levels, Engine& engine) {
  std::vector<std::vector<char>> nets(levels, std::vector<char>(n, 0));
  for (int t = 1; t <= levels; ++t) {
    const double p = std::ldexp(1.0, -t);
    for (int x = 0; x < n; ++x) nets[t - 1][x] = bernoulli(engine, p);
  }
  return nets;
}

double distance_to_mask(const MetricSpace& m, int x, const std::vector<char>& mask) {
  double best = std::numeric_limits<double>::infinity();
  for (int y = 0; y < m.size(); ++y)
    if (mask[y]) best = std::min(best, m(x, y));
  return best;
}

int small_ratio_levels(int n) { return n >= 2 ? ceil_log2(n) : 0; }

}  // namespace

Embedding frechet_map(const MetricSpace& m, const ZeroSetDistribution& dist, int samples) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "frechet_map needs samples >= 1");
  const int n = m.size();
  const std::vector<PointSet> sets = dist.draw_many(samples);
  const double scale = 1.0 / std::sqrt(static_cast<double>(samples));
  Eigen::MatrixXd c(n, samples);
  for (int t = 0; t < samples; ++t)
    for (int x = 0; x < n; ++x)
      c(x, t) = scale * (sets[t].empty() ? m.diameter() : m.distance_to_set(x, sets[t]));
  return {std::move(c), 1.0};
}

Embedding neighborhood_extend(const MetricSpace& m, const Embedding& phi, const PointSet& s) {
  if (s.empty()) throw Error(ErrorKind::EmptySet, "neighborhood_extend needs a nonempty set");
  if (phi.size() != m.size())
    throw Error(ErrorKind::InvalidArgument, "map and metric disagree on the point count");
  const int n = m.size();
  Eigen::MatrixXd c(n, phi.dim() + 1);
  c.leftCols(phi.dim()) = phi.coords();
  for (int x = 0; x < n; ++x) c(x, phi.dim()) = m.distance_to_set(x, s);
  c /= std::sqrt(2.0);
  return {std::move(c), std::sqrt((phi.lip_bound() * phi.lip_bound() + 1.0) / 2.0)};
}

SingleScaleProvider::SingleScaleProvider(const MetricSpace& m, ProviderConfig config,
                                         std::uint64_t seed)
    : metric_(m), config_(std::move(config)), seed_(seed) {
  if (config_.zero_set_samples < 1)
    throw Error(ErrorKind::InvalidArgument, "provider needs zero_set_samples >= 1");
}

Embedding SingleScaleProvider::map(const PointSet& s, double tau) const {
  if (s.empty()) throw Error(ErrorKind::EmptySet, "single-scale map needs a nonempty set");
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "single-scale map needs tau > 0");
  auto key = std::make_pair(s, tau);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  std::string name = "phi/" + std::to_string(std::bit_cast<std::uint64_t>(tau));
  for (int v : s) name += "/" + std::to_string(v);
  const std::uint64_t seed = derive_seed(seed_, name);
  ZeroSetDistribution dist =
      config_.kind == ZeroSetKind::Arv
          ? arv_zero_set_family(metric_, tau, config_.arv, seed, s)
          : partition_zero_sets(metric_, tau, seed, s);
  Embedding e = frechet_map(metric_, dist, config_.zero_set_samples);
  std::lock_guard lock(mutex_);
  if (cache_.size() < kProviderCacheLimit) cache_.emplace(std::move(key), e);
  return e;
}

Embedding gamma_map(const MetricSpace& m, const PointSet& u, int k, double tau,
                    const SingleScaleProvider& provider, int samples, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "gamma_map needs k >= 2");
  if (u.empty()) throw Error(ErrorKind::EmptySet, "gamma_map needs a nonempty set");
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "gamma_map needs samples >= 1");
  const int size = std::min(static_cast<int>(u.size()), k);
  std::vector<Embedding> parts(samples);
  parallel_for(samples, [&](std::size_t i) {
    Engine engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const PointSet s = random_subset(engine, u, size);
    parts[i] = neighborhood_extend(m, provider.map(s, tau / 2.0), s);
  });
  return direct_sum(parts, 1.0 / std::sqrt(static_cast<double>(samples)));
}

Embedding lambda_map(const MetricSpace& m, double tau, int k, double alpha_hat,
                     const SingleScaleProvider& provider, const LambdaConfig& config,
                     std::uint64_t seed) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "lambda_map needs tau > 0");
  if (k < 2) throw Error(ErrorKind::InvalidArgument, "lambda_map needs k >= 2");
  if (config.samples < 1) throw Error(ErrorKind::InvalidArgument, "lambda_map needs samples >= 1");
  const int n = m.size();
  const double d = 4.0 * tau * alpha_hat;
  std::vector<Eigen::MatrixXd> blocks(config.samples);
  parallel_for(config.samples, [&](std::size_t i) {
    const std::uint64_t sample_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    Engine engine = make_engine(sample_seed);
    const RandomPartition p = padded_partition(m, d, engine);
    std::vector<PointConfig> images(p.clusters.size());
    int dim = 0;
    for (std::size_t c = 0; c < p.clusters.size(); ++c) {
      const PointSet& cluster = p.clusters[c];
      const Embedding g = gamma_map(m, cluster, k, tau, provider, config.gamma_samples,
                                    derive_seed(sample_seed, static_cast<std::uint64_t>(c)));
      Eigen::MatrixXd rows(cluster.size(), g.dim());
      for (std::size_t a = 0; a < cluster.size(); ++a) rows.row(a) = g.coords().row(cluster[a]);
      images[c] = truncation_map(PointConfig{std::move(rows)}, tau);
      dim = std::max(dim, images[c].dim());
    }
    // clusters share one coordinate block; rho vanishes on cluster borders
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, dim);
    for (std::size_t c = 0; c < p.clusters.size(); ++c) {
      const PointSet& cluster = p.clusters[c];
      for (std::size_t a = 0; a < cluster.size(); ++a) {
        const int z = cluster[a];
        const double rho = std::min(1.0, p.padding[z] / tau);
        block.row(z).head(images[c].dim()) = 0.5 * rho * images[c].coords.row(a);
      }
    }
    blocks[i] = std::move(block);
  });
  int total = 0;
  for (const auto& b : blocks) total += static_cast<int>(b.cols());
  Eigen::MatrixXd c(n, total);
  int col = 0;
  for (const auto& b : blocks) {
    c.middleCols(col, b.cols()) = b;
    col += static_cast<int>(b.cols());
  }
  c /= std::sqrt(static_cast<double>(config.samples));
  return {std::move(c), 1.0};
}

Embedding small_ratio_map(const MetricSpace& m, double tau, int samples, std::uint64_t seed) {
  if (!(tau > 0.0)) throw Error(ErrorKind::InvalidArgument, "small_ratio_map needs tau > 0");
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "small_ratio_map needs samples >= 1");
  const int n = m.size();
  const int levels = small_ratio_levels(n);
  Eigen::MatrixXd c(n, static_cast<Eigen::Index>(samples) * levels);
  if (levels == 0) return {std::move(c), 1.0};
  const double scale = 1.0 / std::sqrt(static_cast<double>(samples) * levels);
  parallel_for(samples, [&](std::size_t i) {
    Engine engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto nets = draw_nets(n, levels, engine);
    for (int t = 0; t < levels; ++t)
      for (int x = 0; x < n; ++x)
        c(x, static_cast<Eigen::Index>(i) * levels + t) =
            scale * std::min(distance_to_mask(m, x, nets[t]), tau / 4.0);
  });
  return {std::move(c), 1.0};
}

SmallRatioEvents small_ratio_events(const MetricSpace& m, double tau, double lambda, int samples,
                                    std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "small_ratio_events needs samples >= 1");
  const int n = m.size();
  const int levels = small_ratio_levels(n);
  SmallRatioEvents ev;
  ev.tau = tau;
  ev.lambda = lambda;
  if (levels == 0) return ev;
  for (int x = 0; x < n; ++x) {
    const int half = ball_size(m, x, tau / 2.0);
    if (ball_size(m, x, tau) <= lambda * half) {
      ev.members.push_back(x);
      ev.t.push_back(std::clamp(static_cast<int>(std::bit_width(static_cast<unsigned>(half))) - 1, 1, levels));
    }
  }
  std::vector<int> far(ev.members.size(), 0), close(ev.members.size(), 0);
  for (int i = 0; i < samples; ++i) {
    Engine engine = make_engine(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const auto nets = draw_nets(n, levels, engine);
    for (std::size_t a = 0; a < ev.members.size(); ++a) {
      const double d = distance_to_mask(m, ev.members[a], nets[ev.t[a] - 1]);
      far[a] += d >= tau / 4.0;
      close[a] += d <= tau / 8.0;
    }
  }
  for (std::size_t a = 0; a < ev.members.size(); ++a) {
    ev.p_far.push_back(far[a] / static_cast<double>(samples));
    ev.p_close.push_back(close[a] / static_cast<double>(samples));
    ev.epsilon = std::min({ev.epsilon, ev.p_far.back(), ev.p_close.back()});
  }
  return ev;
}

}  // namespace mdesc
