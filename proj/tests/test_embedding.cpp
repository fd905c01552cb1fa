#include "mdesc/embedding.hpp"
#include "mdesc/error.hpp"
#include "mdesc/generate.hpp"
#include "mdesc/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace mdesc;

namespace {

PointConfig random_cloud(Engine& engine, int n, int dim, double spread) {
  Eigen::MatrixXd c(n, dim);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < dim; ++k) c(i, k) = spread * standard_normal(engine);
  return {c};
}

void expect_truncation_bounds(const PointConfig& in, const PointConfig& out, double tau) {
  ASSERT_EQ(in.size(), out.size());
  const double slack = 1e-9 * std::max(1.0, tau);
  for (int i = 0; i < out.size(); ++i) EXPECT_NEAR(out.coords.row(i).norm(), tau, 1e-9 * tau);
  for (int i = 0; i < in.size(); ++i) {
    for (int j = i + 1; j < in.size(); ++j) {
      double r = std::min(tau, in.distance(i, j));
      double g = out.distance(i, j);
      EXPECT_GE(g, 0.5 * r - slack) << i << "," << j;
      EXPECT_LE(g, r + slack) << i << "," << j;
    }
  }
}

}  // namespace

TEST(Truncation, SinglePointHasNormTau) {
  PointConfig p{Eigen::MatrixXd::Constant(1, 3, 7.0)};
  auto g = truncation_map(p, 2.5);
  ASSERT_EQ(g.size(), 1);
  EXPECT_NEAR(g.coords.row(0).norm(), 2.5, 1e-12);
}

TEST(Truncation, DuplicatesCollapse) {
  Eigen::MatrixXd c(3, 2);
  c << 0, 0, 1, 1, 0, 0;
  auto g = truncation_map(PointConfig{c}, 1.0);
  EXPECT_EQ(g.distance(0, 2), 0.0);
  EXPECT_GT(g.distance(0, 1), 0.5);
}

TEST(Truncation, RandomFiveDimSets) {
  Engine engine = make_engine(derive_seed(11, "truncation"));
  for (int trial = 0; trial < 100; ++trial) {
    auto p = random_cloud(engine, 30, 5, 0.6);
    auto g = truncation_map(p, 1.0);
    expect_truncation_bounds(p, g, 1.0);
  }
}

TEST(Truncation, ClosedFormDistance) {
  // the image distance is tau^2 (1 - exp(-r^2/tau^2)) by construction
  Engine engine = make_engine(5);
  auto p = random_cloud(engine, 12, 3, 2.0);
  double tau = 1.7;
  auto g = truncation_map(p, tau);
  for (int i = 0; i < p.size(); ++i)
    for (int j = i + 1; j < p.size(); ++j) {
      double r = p.distance(i, j);
      double expect = tau * std::sqrt(1.0 - std::exp(-r * r / (tau * tau)));
      EXPECT_NEAR(g.distance(i, j), expect, 1e-7 * tau);
    }
}

TEST(Truncation, ScalesAndClusters) {
  Engine engine = make_engine(9);
  for (double tau : {1e-3, 0.1, 10.0, 1e3}) {
    auto p = random_cloud(engine, 25, 4, 1.0);
    // a tight cluster next to far points
    for (int i = 0; i < 5; ++i) p.coords.row(i) = p.coords.row(5) + 1e-4 * p.coords.row(i);
    expect_truncation_bounds(p, truncation_map(p, tau), tau);
  }
}

TEST(Truncation, RejectsBadTau) {
  PointConfig p{Eigen::MatrixXd::Zero(2, 1)};
  EXPECT_THROW(truncation_map(p, 0.0), Error);
}

TEST(EmbeddingOps, DirectSumBoundAndCoords) {
  Eigen::MatrixXd a(2, 1), b(2, 2);
  a << 0, 3;
  b << 0, 0, 4, 0;
  Embedding ea(a, 1.0), eb(b, 2.0);
  auto s = direct_sum(ea, eb, 0.5);
  EXPECT_EQ(s.dim(), 3);
  EXPECT_NEAR(s.lip_bound(), 0.5 * std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(s.distance(0, 1), 2.5, 1e-15);
}

TEST(EmbeddingOps, MeasuredLipschitzOfPathLine) {
  auto m = path(5);
  Eigen::MatrixXd c(5, 1);
  for (int i = 0; i < 5; ++i) c(i, 0) = 2.0 * i;
  EXPECT_NEAR(measured_lipschitz(m, Embedding(c, 2.0)), 2.0, 1e-15);
}

TEST(EmbeddingOps, TruncateKeepsBound) {
  auto m = hypercube(3);
  Eigen::MatrixXd c(8, 3);
  for (int x = 0; x < 8; ++x)
    for (int k = 0; k < 3; ++k) c(x, k) = (x >> k) & 1;
  Embedding e(c, 1.0);
  auto t = truncate(e, 0.5);
  EXPECT_EQ(t.lip_bound(), 1.0);
  EXPECT_LE(measured_lipschitz(m, t), 1.0 + 1e-9);
}
