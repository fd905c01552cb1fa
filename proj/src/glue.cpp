#include "mdesc/glue.hpp"

#include "mdesc/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mdesc {

namespace {

// sorted[x][i]: i-th smallest distance from x (sorted[x][0] = 0)
std::vector<std::vector<double>> sorted_distances(const MetricSpace& m) {
  const int n = m.size();
  std::vector<std::vector<double>> out(n, std::vector<double>(n));
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) out[x][y] = m(x, y);
    std::sort(out[x].begin(), out[x].end());
  }
  return out;
}

double radius_from_sorted(const std::vector<double>& sorted, int t) {
  // |B(x,R)| <= 2^t exactly for R below the (2^t + 1)-th smallest distance
  const long long count = 1LL << t;
  if (count >= static_cast<long long>(sorted.size())) return std::numeric_limits<double>::infinity();
  return sorted[count];
}

}  // namespace

double glue_lip_bound(int n, const GlueConfig& config) {
  if (n < 2) return 0.0;
  return kGlueConstant * std::sqrt(std::log2(static_cast<double>(n)) *
                                   std::log2(4.0 * config.A * config.B));
}

double bump(double r, const GlueConfig& config) {
  const double a = config.A, b = config.B;
  if (!(r > 1.0 / (2.0 * b)) || r >= 4.0 * a) return 0.0;
  if (r < 1.0 / b) return 2.0 * b * (r - 1.0 / (2.0 * b));
  if (r <= 2.0 * a) return 1.0;
  return (4.0 * a - r) / (2.0 * a);
}

double growth_radius(const MetricSpace& m, int x, int t) {
  std::vector<double> sorted(m.size());
  for (int y = 0; y < m.size(); ++y) sorted[y] = m(x, y);
  std::sort(sorted.begin(), sorted.end());
  return radius_from_sorted(sorted, t);
}

int glue_levels(int n) { return n >= 2 ? ceil_log2(n) : 0; }

ScaleRange glue_scale_range(const MetricSpace& m, const GlueConfig& config) {
  const ScaleRange base = dyadic_scales(m);
  const int widen = ceil_log2(4.0 * config.A * config.B);
  return {base.lo - widen, base.hi + widen};
}

int glue_active_count(const MetricSpace& m, int x, int scale, const GlueConfig& config) {
  int count = 0;
  for (int t = 0; t < glue_levels(m.size()); ++t)
    count += bump(std::ldexp(growth_radius(m, x, t), -scale), config) == 1.0;
  return count;
}

Embedding glue(const MetricSpace& m, const std::map<int, Embedding>& maps,
               const GlueConfig& config) {
  if (!(config.A >= 1.0 && config.B >= 1.0))
    throw Error(ErrorKind::InvalidArgument, "glue needs A, B >= 1");
  const int n = m.size();
  if (n < 2) return Embedding::zero(n, 0);
  const ScaleRange range = glue_scale_range(m, config);
  for (const auto& [scale, e] : maps) {
    if (e.size() != n)
      throw Error(ErrorKind::ScaleRangeMismatch,
                  "map at scale " + std::to_string(scale) + " has the wrong point count");
    if (scale < range.lo || scale > range.hi)
      throw Error(ErrorKind::ScaleRangeMismatch,
                  "scale " + std::to_string(scale) + " outside the glue range");
    if (e.lip_bound() > 1.0 + 1e-9)
      throw Error(ErrorKind::InvalidArgument, "glue needs 1-Lipschitz maps");
  }

  const auto sorted = sorted_distances(m);
  const int levels = glue_levels(n);
  std::vector<std::vector<double>> radius(n, std::vector<double>(levels));
  for (int x = 0; x < n; ++x)
    for (int t = 0; t < levels; ++t) radius[x][t] = radius_from_sorted(sorted[x], t);

  std::map<int, PointConfig> truncated;
  auto truncated_map = [&](int scale) -> const PointConfig& {
    auto it = truncated.find(scale);
    if (it != truncated.end()) return it->second;
    const double tau = std::ldexp(1.0, scale) / config.B;
    auto src = maps.find(scale);
    PointConfig g = src != maps.end() && src->second.dim() > 0
                        ? truncation_map(src->second.points(), tau)
                        : PointConfig{Eigen::MatrixXd::Constant(n, 1, tau)};
    return truncated.emplace(scale, std::move(g)).first->second;
  };

  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd weight(n);
  for (int t = 0; t < levels; ++t) {
    for (int scale = range.lo; scale <= range.hi; ++scale) {
      for (int x = 0; x < n; ++x) weight(x) = bump(std::ldexp(radius[x][t], -scale), config);
      if (weight.maxCoeff() == 0.0) continue;
      blocks.push_back(weight.asDiagonal() * truncated_map(scale).coords);
    }
  }
  int dim = 0;
  for (const auto& b : blocks) dim += static_cast<int>(b.cols());
  Eigen::MatrixXd c(n, dim);
  int col = 0;
  for (const auto& b : blocks) {
    c.middleCols(col, b.cols()) = b;
    col += static_cast<int>(b.cols());
  }
  return {std::move(c), glue_lip_bound(n, config)};
}

PointSet s_tau_K(const MetricSpace& m, double tau, double K, double C, double eps,
                 double alpha_hat) {
  if (!(K >= 2.0)) throw Error(ErrorKind::InvalidArgument, "s_tau_K needs K >= 2");
  const double outer = 8.0 * tau * alpha_hat;
  const double inner = tau / (12.0 * C * std::pow(std::log2(K), eps));
  PointSet out;
  for (int x = 0; x < m.size(); ++x)
    if (ball_size(m, x, outer) <= K * ball_size(m, x, inner)) out.push_back(x);
  return out;
}

DistortionReport distortion_report(const MetricSpace& m, const Embedding& e) {
  if (e.size() != m.size())
    throw Error(ErrorKind::InvalidArgument, "embedding and metric disagree on the point count");
  DistortionReport r;
  for (int x = 0; x < m.size(); ++x) {
    for (int y = x + 1; y < m.size(); ++y) {
      const double d = m(x, y);
      if (d <= 0.0) continue;
      const double img = e.distance(x, y);
      const double expand = img / d;
      const double contract = img > 0.0 ? d / img : std::numeric_limits<double>::infinity();
      if (expand > r.lip) {
        r.lip = expand;
        r.lip_x = x;
        r.lip_y = y;
      }
      if (contract > r.colip) {
        r.colip = contract;
        r.colip_x = x;
        r.colip_y = y;
      }
    }
  }
  r.distortion = r.colip_x < 0 ? 1.0 : r.lip * r.colip;
  return r;
}

DistortionReport evaluate_distortion(const MetricSpace& m, const Embedding& e) {
  DistortionReport r = distortion_report(m, e);
  if (std::isinf(r.colip))
    throw Error(ErrorKind::NonInjective, "points " + std::to_string(r.colip_x) + " and " +
                                             std::to_string(r.colip_y) + " share an image");
  return r;
}

PipelineResult full_embedding(const MetricSpace& m, const SingleScaleProvider& ensemble,
                              const PipelineConfig& config, std::uint64_t seed) {
  const int n = m.size();
  PipelineResult result;
  if (n < 2) {
    result.embedding = Embedding::zero(n, 0);
    return result;
  }
  result.alpha_hat = config.alpha_override > 0.0
                         ? config.alpha_override
                         : estimate_alpha(m, config.alpha_samples, derive_seed(seed, "alpha"));
  const ScaleRange scales = dyadic_scales(m);

  // audit the ensemble hypothesis on X itself
  for (int s = scales.lo; s <= scales.hi; ++s) {
    const double tau = std::ldexp(1.0, s);
    const Embedding phi = ensemble.map(all_points(n), tau);
    const double floor_value =
        tau / (config.C * std::pow(std::log2(static_cast<double>(n)), config.eps));
    int checked = 0;
    for (int x = 0; x < n && checked < config.audit_pairs; ++x) {
      for (int y = x + 1; y < n && checked < config.audit_pairs; ++y) {
        if (m(x, y) < tau || m(x, y) > 6.0 * tau) continue;
        ++checked;
        if (phi.distance(x, y) < floor_value)
          result.warnings.push_back(
              Error(ErrorKind::EnsembleContractViolation,
                    "scale " + std::to_string(s) + " pair (" + std::to_string(x) + "," +
                        std::to_string(y) + ")")
                  .what());
      }
    }
  }

  std::vector<Embedding> stages;
  for (double K = n; K >= 4.0; K = std::sqrt(K)) result.K.push_back(K);
  for (std::size_t j = 0; j < result.K.size(); ++j) {
    const double K = result.K[j];
    const GlueConfig glue_config{4.0 * result.alpha_hat,
                                 12.0 * config.C * std::pow(std::log2(K), config.eps)};
    const int k = std::max(2, static_cast<int>(std::floor(K)));
    std::map<int, Embedding> maps;
    for (int s = scales.lo; s <= scales.hi; ++s) {
      const std::string key = "stage/" + std::to_string(j) + "/scale/" + std::to_string(s);
      maps.emplace(s, lambda_map(m, std::ldexp(1.0, s), k, result.alpha_hat, ensemble,
                                 {config.samples, config.gamma_samples}, derive_seed(seed, key)));
    }
    stages.push_back(glue(m, maps, glue_config));
  }
  {
    std::vector<Embedding> parts;
    for (int s = scales.lo; s <= scales.hi; ++s)
      parts.push_back(small_ratio_map(m, std::ldexp(1.0, s), config.samples,
                                      derive_seed(seed, "small/" + std::to_string(s))));
    stages.push_back(direct_sum(parts));
  }

  for (std::size_t j = 0; j < stages.size(); ++j) {
    const DistortionReport r = distortion_report(m, stages[j]);
    result.stages.push_back({static_cast<int>(j), j < result.K.size() ? result.K[j] : 0.0,
                             stages[j].dim(), r.lip, r.colip, r.distortion});
  }
  Embedding phi = direct_sum(stages);
  const double lip = measured_lipschitz(m, phi);
  if (lip > 0.0) phi = Embedding(phi.coords() / lip, 1.0);
  result.embedding = std::move(phi);
  result.total = distortion_report(m, result.embedding);
  return result;
}

}  // namespace mdesc
