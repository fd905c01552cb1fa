#include "mdesc/error.hpp"
#include "mdesc/generate.hpp"
#include "mdesc/glue.hpp"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>

using namespace mdesc;

namespace {

// 1-Lipschitz maps of the cube: bit coordinates mixed per scale
std::map<int, Embedding> cube_maps(int d, const ScaleRange& range) {
  const int n = 1 << d;
  std::map<int, Embedding> maps;
  for (int s = range.lo; s <= range.hi; ++s) {
    Eigen::MatrixXd c(n, d);
    for (int x = 0; x < n; ++x)
      for (int k = 0; k < d; ++k) c(x, k) = (((x >> ((k + s + 64) % d)) & 1) ? 0.5 : 0.0);
    maps.emplace(s, Embedding(c, 1.0));
  }
  return maps;
}

int floor_log2_ratio(const MetricSpace& m, int x, int s, const GlueConfig& g) {
  const int outer = ball_size(m, x, std::ldexp(2.0 * g.A, s));
  const int inner = ball_size(m, x, std::ldexp(1.0, s) / g.B);
  return static_cast<int>(std::bit_width(static_cast<unsigned>(outer / inner))) - 1;
}

// levels t with #{y : d(x,y) < 2^s/B} <= 2^t < |B(x, 2^(s+1) A)|
int enumerated_count(const MetricSpace& m, int x, int s, const GlueConfig& g) {
  const double inner_r = std::ldexp(1.0, s) / g.B;
  int open_inner = 0;
  for (int y = 0; y < m.size(); ++y) open_inner += m(x, y) < inner_r;
  const int outer = ball_size(m, x, std::ldexp(2.0 * g.A, s));
  int count = 0;
  for (int t = 0; t < glue_levels(m.size()); ++t) count += open_inner <= (1 << t) && (1 << t) < outer;
  return count;
}

}  // namespace

TEST(Bump, Shape) {
  GlueConfig g{2.0, 3.0};
  EXPECT_EQ(bump(0.0, g), 0.0);
  EXPECT_EQ(bump(1.0 / 6.0, g), 0.0);
  EXPECT_NEAR(bump(0.25, g), 0.5, 1e-15);
  EXPECT_EQ(bump(1.0 / 3.0, g), 1.0);
  EXPECT_EQ(bump(4.0, g), 1.0);
  EXPECT_NEAR(bump(6.0, g), 0.5, 1e-15);
  EXPECT_EQ(bump(8.0, g), 0.0);
  EXPECT_EQ(bump(INFINITY, g), 0.0);
  double worst = 0.0;
  for (double r = 0.0; r < 10.0; r += 1e-3) worst = std::max(worst, std::abs(bump(r + 1e-3, g) - bump(r, g)) / 1e-3);
  EXPECT_LE(worst, 2.0 * g.B + 1e-9);
}

TEST(GrowthRadius, PathOrderStatistics) {
  auto m = path(8);
  // from vertex 0 the ball of radius R holds floor(R)+1 points
  EXPECT_EQ(growth_radius(m, 0, 0), 1.0);
  EXPECT_EQ(growth_radius(m, 0, 1), 2.0);
  EXPECT_EQ(growth_radius(m, 0, 2), 4.0);
  EXPECT_TRUE(std::isinf(growth_radius(m, 0, 3)));
  // from the middle vertex 3: distances 0,1,1,2,2,3,3,4
  EXPECT_EQ(growth_radius(m, 3, 1), 1.0);
  EXPECT_EQ(growth_radius(m, 3, 2), 2.0);
  for (int t = 0; t < 3; ++t)
    for (int x = 0; x < 8; ++x) {
      const double r = growth_radius(m, x, t);
      EXPECT_LE(ball_size(m, x, std::nextafter(r, 0.0)), 1 << t);
      EXPECT_GT(ball_size(m, x, r), 1 << t);
    }
}

TEST(Glue, SinglePointIsZeroDimensional) {
  auto m = hypercube(0);
  auto e = glue(m, {}, {});
  EXPECT_EQ(e.size(), 1);
  EXPECT_EQ(e.dim(), 0);
}

TEST(Glue, RejectsMismatchedMaps) {
  auto m = hypercube(2);
  GlueConfig g{1.0, 1.0};
  std::map<int, Embedding> bad{{0, Embedding::zero(3, 1)}};
  EXPECT_THROW(glue(m, bad, g), Error);
  std::map<int, Embedding> far{{40, Embedding::zero(4, 1)}};
  try {
    glue(m, far, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ScaleRangeMismatch);
  }
}

TEST(Glue, ActiveCountMatchesBallRatio) {
  for (const auto& m : {hypercube(4), cycle(8), grid(3, 5), random_l1(20, 2, 61)}) {
    for (GlueConfig g : {GlueConfig{1.0, 1.0}, GlueConfig{2.0, 3.0}, GlueConfig{16.0, 24.0}}) {
      const ScaleRange r = glue_scale_range(m, g);
      for (int x = 0; x < m.size(); ++x)
        for (int s = r.lo; s <= r.hi; ++s) {
          const int count = glue_active_count(m, x, s, g);
          const int floor_ratio = floor_log2_ratio(m, x, s, g);
          EXPECT_GE(count, floor_ratio);
          EXPECT_EQ(count, enumerated_count(m, x, s, g));
        }
    }
  }
}

TEST(Glue, LipschitzAndLowerBoundOnCube) {
  auto m = hypercube(4);
  for (GlueConfig g : {GlueConfig{1.0, 1.0}, GlueConfig{16.0, 24.0}}) {
    const ScaleRange r = glue_scale_range(m, g);
    auto maps = cube_maps(4, r);
    auto e = glue(m, maps, g);
    EXPECT_LE(measured_lipschitz(m, e), glue_lip_bound(16, g));
    for (int x = 0; x < 16; ++x)
      for (int y = 0; y < 16; ++y) {
        if (x == y) continue;
        for (int s = r.lo; s <= r.hi; ++s) {
          const double lower = 0.25 * std::sqrt(double(glue_active_count(m, x, s, g))) *
                               std::min(std::ldexp(1.0, s) / g.B, maps.at(s).distance(x, y));
          EXPECT_GE(e.distance(x, y), lower * (1 - 1e-9));
        }
      }
  }
}

TEST(Glue, SingleActiveScaleContribution) {
  // with only one supplied map the other scales contribute constant blocks,
  // and the level-by-level bound still holds for that scale
  auto m = cycle(8);
  GlueConfig g{1.0, 2.0};
  Eigen::MatrixXd c(8, 2);
  for (int x = 0; x < 8; ++x) {
    c(x, 0) = std::cos(2 * M_PI * x / 8) * 8 / (2 * M_PI) * 0.9;
    c(x, 1) = std::sin(2 * M_PI * x / 8) * 8 / (2 * M_PI) * 0.9;
  }
  Embedding phi(c, 1.0);
  ASSERT_LE(measured_lipschitz(m, phi), 1.0);
  auto e = glue(m, {{1, phi}}, g);
  for (int x = 0; x < 8; ++x)
    for (int y = 0; y < 8; ++y) {
      if (x == y) continue;
      const double lower = 0.25 * std::sqrt(double(glue_active_count(m, x, 1, g))) *
                           std::min(2.0 / g.B, phi.distance(x, y));
      EXPECT_GE(e.distance(x, y), lower * (1 - 1e-9));
    }
}

TEST(StauK, FullSetAtKEqualsN) {
  for (const auto& m : {hypercube(3), cycle(7), random_l1(12, 3, 62)})
    for (double tau : {0.25, 1.0, 4.0})
      EXPECT_EQ(s_tau_K(m, tau, m.size(), 1.0, 0.5, 3.0).size(), static_cast<std::size_t>(m.size()));
}

TEST(StauK, UniformTinyScaleIsFull) {
  auto m = uniform(6);
  EXPECT_EQ(s_tau_K(m, 0.01, 2.0, 1.0, 0.5, 1.0).size(), 6u);
}

TEST(StauK, CubeThreeByBallCounting) {
  auto m = hypercube(3);
  // outer radius 8 alpha, inner 1/(12 sqrt 2) < 1 holds only the center
  EXPECT_TRUE(s_tau_K(m, 1.0, 4.0, 1.0, 0.5, 1.0).empty());  // 8 > 4 * 1
  EXPECT_EQ(s_tau_K(m, 1.0, 4.0, 1.0, 0.5, 0.125).size(), 8u);  // |B(x,1)| = 4 <= 4
  EXPECT_TRUE(s_tau_K(m, 1.0, 4.0, 1.0, 0.5, 0.25).empty());  // |B(x,2)| = 7 > 4
}

TEST(Distortion, IsometricLine) {
  auto m = path(6);
  Eigen::MatrixXd c(6, 1);
  for (int i = 0; i < 6; ++i) c(i, 0) = i;
  auto r = evaluate_distortion(m, Embedding(c, 1.0));
  EXPECT_NEAR(r.distortion, 1.0, 1e-15);
}

TEST(Distortion, CycleFourOnSquare) {
  auto m = cycle(4);
  Eigen::MatrixXd c(4, 2);
  c << 0, 0, 1, 0, 1, 1, 0, 1;
  auto r = evaluate_distortion(m, Embedding(c, 1.0));
  EXPECT_NEAR(r.lip, 1.0, 1e-15);
  EXPECT_NEAR(r.colip, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.distortion, std::sqrt(2.0), 1e-15);
  auto s = evaluate_distortion(m, Embedding(c * 7.5, 1.0));
  EXPECT_NEAR(s.distortion, r.distortion, 1e-14);
}

TEST(Distortion, NonInjectiveThrows) {
  auto m = path(3);
  try {
    evaluate_distortion(m, Embedding::zero(3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonInjective);
  }
}

TEST(Pipeline, TwoPointsAreIsometric) {
  Eigen::MatrixXd d(2, 2);
  d << 0, 3, 3, 0;
  auto m = validate_metric(d);
  SingleScaleProvider provider(m, {}, 63);
  auto r = full_embedding(m, provider, {}, 64);
  EXPECT_NEAR(r.total.distortion, 1.0, 1e-6);
}

TEST(Pipeline, EquilateralFour) {
  auto m = uniform(4);
  SingleScaleProvider provider(m, {}, 65);
  auto r = full_embedding(m, provider, {}, 66);
  EXPECT_LE(r.total.distortion, std::sqrt(2.0));
}

TEST(Pipeline, CubeFourSanityCeiling) {
  auto m = hypercube(4);
  SingleScaleProvider provider(m, {}, 67);
  auto r = full_embedding(m, provider, {}, 68);
  EXPECT_LE(r.total.distortion, 16.0);
  EXPECT_LE(measured_lipschitz(m, r.embedding), 1.0 + 1e-12);
  // cascade terminates within ceil(log2 log2 n) + 1 gluing stages
  EXPECT_LE(r.K.size(), static_cast<std::size_t>(ceil_log2(std::log2(16.0)) + 1));
  EXPECT_EQ(r.stages.size(), r.K.size() + 1);
}

TEST(Pipeline, StratificationIsExhaustive) {
  for (const auto& m : {hypercube(4), random_l1(32, 3, 69), grid(4, 4)}) {
    const double alpha = estimate_alpha(m, 200, 70);
    std::vector<double> Ks;
    for (double K = m.size(); K >= 4.0; K = std::sqrt(K)) Ks.push_back(K);
    Ks.push_back(std::sqrt(Ks.back()));
    const ScaleRange r = dyadic_scales(m);
    for (int s = r.lo; s <= r.hi; ++s) {
      std::vector<PointSet> strata;
      for (double K : Ks) strata.push_back(s_tau_K(m, std::ldexp(1.0, s), K, 1.0, 0.5, alpha));
      EXPECT_EQ(strata.front().size(), static_cast<std::size_t>(m.size()));
      for (int x = 0; x < m.size(); ++x) {
        auto in = [&](std::size_t j) {
          return std::binary_search(strata[j].begin(), strata[j].end(), x);
        };
        bool covered = in(strata.size() - 1);
        for (std::size_t j = 0; j + 1 < strata.size() && !covered; ++j) covered = in(j) && !in(j + 1);
        EXPECT_TRUE(covered);
      }
    }
  }
}

TEST(Pipeline, ScalingInvariance) {
  auto m = random_l1(16, 3, 71);
  auto doubled = validate_metric(2.0 * m.matrix(), {}, {1e-12, false});
  SingleScaleProvider p1(m, {}, 72), p2(doubled, {}, 72);
  auto a = full_embedding(m, p1, {}, 73);
  auto b = full_embedding(doubled, p2, {}, 73);
  EXPECT_NEAR(b.total.distortion / a.total.distortion, 1.0, 0.05);
}
