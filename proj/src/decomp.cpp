#include "mdesc/decomp.hpp"

#include "mdesc/embedding.hpp"
#include "mdesc/error.hpp"
#include "mdesc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <tuple>

namespace mdesc {

namespace {

PointSet to_ambient(const PointSet& local, const PointSet& support) {
  PointSet out;
  out.reserve(local.size());
  for (int i : local) out.push_back(support[i]);
  return out;
}

}  // namespace

RandomPartition padded_partition(const MetricSpace& m, double delta, Engine& engine) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "partition scale must be positive");
  const int n = m.size();
  const double radius = uniform_real(engine, delta / 4.0, delta / 2.0);
  const std::vector<int> order = random_permutation(engine, n);

  RandomPartition p;
  p.delta = delta;
  p.cluster_of.assign(n, -1);
  std::vector<int> cluster_of_center(n, -1);
  for (int x = 0; x < n; ++x) {
    int center = -1;
    for (int c : order) {
      if (m(c, x) <= radius) {
        center = c;
        break;
      }
    }
    // x itself is always within the radius, so center is found
    if (cluster_of_center[center] < 0) {
      cluster_of_center[center] = static_cast<int>(p.clusters.size());
      p.clusters.emplace_back();
    }
    p.cluster_of[x] = cluster_of_center[center];
    p.clusters[p.cluster_of[x]].push_back(x);
  }

  p.padding.assign(n, delta);
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (p.cluster_of[y] != p.cluster_of[x]) p.padding[x] = std::min(p.padding[x], m(x, y));
    }
  }
  return p;
}

double estimate_alpha(const MetricSpace& m, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorKind::InvalidArgument, "estimate_alpha needs samples >= 1");
  const int n = m.size();
  if (n < 2) return 1.0;
  const ScaleRange scales = dyadic_scales(m);
  const int need = (samples + 1) / 2;

  double alpha = 1.0;
  for (int e = scales.lo; e <= scales.hi + 1; ++e) {
    const double delta = std::ldexp(1.0, e);
    const std::uint64_t scale_seed = derive_seed(seed, "alpha/" + std::to_string(e));
    std::vector<std::vector<double>> pads(samples);
    parallel_for(samples, [&](std::size_t s) {
      Engine engine = make_engine(derive_seed(scale_seed, static_cast<std::uint64_t>(s)));
      pads[s] = padded_partition(m, delta, engine).padding;
    });
    std::vector<double> column(samples);
    for (int x = 0; x < n; ++x) {
      for (int s = 0; s < samples; ++s) column[s] = pads[s][x];
      std::nth_element(column.begin(), column.begin() + (need - 1), column.end(),
                       std::greater<>());
      const double q = column[need - 1];
      if (q <= 0.0) return std::numeric_limits<double>::infinity();
      alpha = std::max(alpha, delta / q);
    }
  }
  const int j = std::max(0, static_cast<int>(std::ceil(8.0 * std::log2(alpha) - 1e-12)));
  return std::exp2(j / 8.0);
}

PointSet zero_set_from_partition(const RandomPartition& p, Engine& engine) {
  PointSet z;
  for (const PointSet& cluster : p.clusters) {
    if (!bernoulli(engine, 0.5)) z.insert(z.end(), cluster.begin(), cluster.end());
  }
  std::sort(z.begin(), z.end());
  return z;
}

PointSet ZeroSetDistribution::draw(std::uint64_t index) const {
  Engine engine = make_engine(derive_seed(seed_, index));
  return sampler_(engine);
}

std::vector<PointSet> ZeroSetDistribution::draw_many(std::size_t count) const {
  std::vector<PointSet> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = draw(i); });
  return out;
}

ZeroSetDistribution partition_zero_sets(const MetricSpace& m, double delta, std::uint64_t seed,
                                        PointSet support) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "zero-set scale must be positive");
  if (support.empty()) support = all_points(m.size());
  auto local = std::make_shared<const MetricSpace>(m.restricted(support));
  auto sup = std::make_shared<const PointSet>(std::move(support));
  return ZeroSetDistribution(ZeroSetKind::Partition, delta, seed,
                             [local, sup, delta](Engine& engine) {
                               RandomPartition p = padded_partition(*local, delta, engine);
                               return to_ambient(zero_set_from_partition(p, engine), *sup);
                             });
}

ArvFamily::ArvFamily(const MetricSpace& support_metric, double delta, const ArvConfig& config,
                     std::uint64_t seed)
    : n_(support_metric.size()), delta_(delta), metric_(support_metric) {
  if (!(delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "ARV scale must be positive");
  if (!(config.sigma > 0.0 && config.sigma < 1.0))
    throw Error(ErrorKind::InvalidArgument, "ARV sigma must lie in (0,1)");
  if (config.directions < 1) throw Error(ErrorKind::InvalidArgument, "ARV needs directions >= 1");

  const NegativeTypeVerdict verdict = is_negative_type(metric_);
  if (!verdict.is_negative_type)
    throw Error(ErrorKind::NotNegativeType, "ARV zero sets need a negative-type metric");
  image_ = truncation_map(sqrt_embedding(metric_), std::sqrt(delta));
  // the truncation shares one constant coordinate; centering removes the
  // common shift it would add to every projection
  image_.coords.rowwise() -= image_.coords.colwise().mean();
  direction_dim_ = std::max(n_, image_.dim());
  threshold_ = config.sigma * std::sqrt(delta) / std::sqrt(static_cast<double>(std::max(n_, 1)));
  prune_distance_ = n_ >= 2 ? delta / std::sqrt(std::log2(static_cast<double>(n_))) : 0.0;

  std::vector<std::tuple<double, int, int>> close;
  std::vector<std::int64_t> w0(static_cast<std::size_t>(n_) * n_, 0);
  const std::int64_t n4 = static_cast<std::int64_t>(n_) * n_ * n_ * n_;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      const double d = metric_(i, j);
      if (d >= delta / 16.0) {
        w0[i * n_ + j] = w0[j * n_ + i] = n4;
        far_pairs_empty_ = false;
      }
      if (d <= prune_distance_) close.emplace_back(d, i, j);
    }
  }
  std::sort(close.begin(), close.end());
  for (const auto& [d, i, j] : close) close_pairs_.emplace_back(i, j);
  weights_.push_back(std::move(w0));

  const int rounds = config.rounds >= 0 ? config.rounds : ceil_log2(std::max(n_, 1));
  for (int k = 0; k < rounds; ++k) {
    const std::vector<std::int64_t>& w = weights_.back();
    const std::uint64_t round_seed = derive_seed(seed, "arv/reweight/" + std::to_string(k));
    std::vector<ArvSplit> splits(config.directions);
    const int current = static_cast<int>(weights_.size()) - 1;
    parallel_for(config.directions, [&](std::size_t s) {
      Engine engine = make_engine(derive_seed(round_seed, static_cast<std::uint64_t>(s)));
      splits[s] = split(current, random_direction(engine));
    });
    std::vector<int> hits(static_cast<std::size_t>(n_) * n_, 0);
    std::vector<char> in_left(n_), in_right(n_);
    for (const ArvSplit& sp : splits) {
      std::fill(in_left.begin(), in_left.end(), 0);
      std::fill(in_right.begin(), in_right.end(), 0);
      for (int x : sp.left_pruned) in_left[x] = 1;
      for (int x : sp.right_pruned) in_right[x] = 1;
      for (int x : sp.left_pruned)
        for (int y = 0; y < n_; ++y)
          if (in_right[y]) ++hits[x * n_ + y];
    }
    std::vector<std::int64_t> next = w;
    for (int i = 0; i < n_; ++i) {
      for (int j = i + 1; j < n_; ++j) {
        // symmetrized frequency of (x,y) in L' x R'
        const double freq = (hits[i * n_ + j] + hits[j * n_ + i]) / (2.0 * config.directions);
        if (next[i * n_ + j] > 0 && freq >= config.heavy_probability) {
          next[i * n_ + j] /= 2;
          next[j * n_ + i] = next[i * n_ + j];
        }
      }
    }
    weights_.push_back(std::move(next));
  }
}

Eigen::VectorXd ArvFamily::random_direction(Engine& engine) const {
  Eigen::VectorXd u(direction_dim_);
  double norm = 0.0;
  do {
    for (int k = 0; k < direction_dim_; ++k) u(k) = standard_normal(engine);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

ArvSplit ArvFamily::split(int weight_index, const Eigen::VectorXd& direction) const {
  const std::vector<std::int64_t>& w = weights_.at(weight_index);
  const Eigen::VectorXd proj = image_.coords * direction.head(image_.dim());
  ArvSplit out;
  std::vector<signed char> side(n_, 0);
  for (int x = 0; x < n_; ++x) {
    if (proj(x) <= -threshold_) {
      side[x] = -1;
      out.left.push_back(x);
    } else if (proj(x) >= threshold_) {
      side[x] = 1;
      out.right.push_back(x);
    }
  }
  std::vector<std::int64_t> copies(n_, 0);
  for (int x = 0; x < n_; ++x)
    for (int y = 0; y < n_; ++y) copies[x] += w[x * n_ + y];
  for (const auto& [a, b] : close_pairs_) {
    if (side[a] == 0 || side[a] != -side[b]) continue;
    const std::int64_t removed = std::min(copies[a], copies[b]);
    copies[a] -= removed;
    copies[b] -= removed;
  }
  for (int x : out.left)
    if (copies[x] > 0) out.left_pruned.push_back(x);
  for (int x : out.right)
    if (copies[x] > 0) out.right_pruned.push_back(x);
  out.emitted = far_pairs_empty_ ? out.left : out.left_pruned;
  return out;
}

PointSet ArvFamily::sample(Engine& engine) const {
  const int k = static_cast<int>(uniform_index(engine, weights_.size()));
  return split(k, random_direction(engine)).emitted;
}

ZeroSetDistribution arv_zero_set_family(const MetricSpace& m, double delta, const ArvConfig& config,
                                        std::uint64_t seed, PointSet support) {
  if (support.empty()) support = all_points(m.size());
  auto family = std::make_shared<const ArvFamily>(m.restricted(support), delta, config,
                                                  derive_seed(seed, "arv/family"));
  auto sup = std::make_shared<const PointSet>(std::move(support));
  return ZeroSetDistribution(ZeroSetKind::Arv, delta, derive_seed(seed, "arv/draws"),
                             [family, sup](Engine& engine) {
                               return to_ambient(family->sample(engine), *sup);
                             });
}

SpreadingEstimate estimate_zeta(const MetricSpace& m, const ZeroSetDistribution& dist, double p,
                                int samples) {
  if (samples < 100) throw Error(ErrorKind::InvalidArgument, "estimate_zeta needs samples >= 100");
  if (!(p > 0.0 && p < 1.0 + 1e-15))
    throw Error(ErrorKind::InvalidArgument, "spreading probability must lie in (0,1]");
  const int n = m.size();
  const double delta = dist.delta();

  SpreadingEstimate est;
  est.p = p;
  est.samples = samples;
  est.delta = delta;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y && m(x, y) >= delta) est.pairs.push_back({x, y, m(x, y)});
  if (est.pairs.empty())
    throw Error(ErrorKind::InsufficientSeparatedPairs, "no pair at distance >= delta");

  // per sample: membership and d(x,Z) for every x
  std::vector<std::vector<char>> member(samples);
  std::vector<std::vector<double>> dist_to(samples);
  parallel_for(samples, [&](std::size_t s) {
    const PointSet z = dist.draw(s);
    member[s].assign(n, 0);
    for (int v : z) member[s][v] = 1;
    dist_to[s].resize(n);
    for (int x = 0; x < n; ++x) dist_to[s][x] = m.distance_to_set(x, z);
  });

  const int need = std::max(1, static_cast<int>(std::ceil(p * samples - 1e-9)));
  est.zeta = 0.0;
  std::vector<double> values;
  for (PairSpreading& row : est.pairs) {
    values.clear();
    for (int s = 0; s < samples; ++s)
      if (member[s][row.y]) values.push_back(dist_to[s][row.x]);
    if (static_cast<int>(values.size()) >= need) {
      std::sort(values.begin(), values.end(), std::greater<>());
      const double q = values[need - 1];
      if (q > 0.0) {
        row.zeta = delta / q;
        const auto hits = std::count_if(values.begin(), values.end(),
                                        [q](double v) { return v >= q; });
        row.empirical_p = static_cast<double>(hits) / samples;
      }
    }
    est.zeta = std::max(est.zeta, row.zeta);
  }
  return est;
}

}  // namespace mdesc
