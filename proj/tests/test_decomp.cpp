#include "mdesc/decomp.hpp"
#include "mdesc/error.hpp"
#include "mdesc/generate.hpp"
#include "mdesc/parallel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace mdesc;

namespace {

MetricSpace two_points(double d) {
  Eigen::MatrixXd m(2, 2);
  m << 0, d, d, 0;
  return validate_metric(m);
}

double cluster_diameter(const MetricSpace& m, const PointSet& c) {
  double diam = 0.0;
  for (int a : c)
    for (int b : c) diam = std::max(diam, m(a, b));
  return diam;
}

// sup{r : B(x,r) inside P(x)} recomputed from scratch
double recomputed_padding(const MetricSpace& m, const RandomPartition& p, int x) {
  double pad = p.delta;
  for (int y = 0; y < m.size(); ++y)
    if (p.cluster_of[y] != p.cluster_of[x]) pad = std::min(pad, m(x, y));
  return pad;
}

void check_partition(const MetricSpace& m, const RandomPartition& p) {
  int covered = 0;
  for (std::size_t c = 0; c < p.clusters.size(); ++c) {
    EXPECT_LT(cluster_diameter(m, p.clusters[c]), p.delta);
    for (int x : p.clusters[c]) EXPECT_EQ(p.cluster_of[x], static_cast<int>(c));
    covered += static_cast<int>(p.clusters[c].size());
  }
  EXPECT_EQ(covered, m.size());
  for (int x = 0; x < m.size(); ++x) {
    EXPECT_GE(p.padding[x], 0.0);
    EXPECT_EQ(p.padding[x], recomputed_padding(m, p, x));
    for (int y = 0; y < m.size(); ++y)
      if (m(x, y) < p.padding[x]) EXPECT_EQ(p.cluster_of[y], p.cluster_of[x]);
  }
}

}  // namespace

TEST(Partition, SinglePoint) {
  auto m = hypercube(0);
  Engine engine = make_engine(1);
  auto p = padded_partition(m, 3.0, engine);
  ASSERT_EQ(p.clusters.size(), 1u);
  EXPECT_EQ(p.padding[0], 3.0);
}

TEST(Partition, LargeDeltaSwallowsEverything) {
  auto m = uniform(6);
  Engine engine = make_engine(2);
  for (int i = 0; i < 50; ++i) {
    auto p = padded_partition(m, 10.0, engine);  // radius >= 2.5 > diam
    EXPECT_EQ(p.clusters.size(), 1u);
  }
}

TEST(Partition, CycleEightDeltaTwoGivesAdjacentPairs) {
  auto m = cycle(8);
  Engine engine = make_engine(3);
  for (int i = 0; i < 500; ++i) {
    auto p = padded_partition(m, 2.0, engine);
    for (const auto& c : p.clusters) {
      ASSERT_LE(c.size(), 2u);
      if (c.size() == 2) EXPECT_EQ(m(c[0], c[1]), 1.0);
    }
  }
}

TEST(Partition, InvariantsOnSuiteInstances) {
  std::vector<MetricSpace> spaces{hypercube(3), hypercube(4), cycle(7), grid(3, 4),
                                  random_l1(20, 3, 4), uniform(5)};
  Engine engine = make_engine(4);
  for (const auto& m : spaces)
    for (double delta : {0.3, 1.0, 2.0, 3.5, 8.0})
      for (int i = 0; i < 40; ++i) check_partition(m, padded_partition(m, delta, engine));
}

TEST(ZeroSet, SingleClusterIsAllOrNothing) {
  RandomPartition p;
  p.delta = 1.0;
  p.cluster_of = {0, 0, 0};
  p.clusters = {{0, 1, 2}};
  Engine engine = make_engine(5);
  int full = 0;
  const int draws = 4000;
  for (int i = 0; i < draws; ++i) {
    auto z = zero_set_from_partition(p, engine);
    ASSERT_TRUE(z.empty() || z.size() == 3u);
    full += z.size() == 3u;
  }
  EXPECT_NEAR(full / double(draws), 0.5, 3 * std::sqrt(0.25 / draws));
}

TEST(ZeroSet, TwoClustersUniformOverFourSubsets) {
  RandomPartition p;
  p.delta = 1.0;
  p.cluster_of = {0, 1};
  p.clusters = {{0}, {1}};
  Engine engine = make_engine(6);
  std::map<PointSet, int> counts;
  const int draws = 8000;
  for (int i = 0; i < draws; ++i) ++counts[zero_set_from_partition(p, engine)];
  ASSERT_EQ(counts.size(), 4u);
  for (const auto& [z, c] : counts) EXPECT_NEAR(c / double(draws), 0.25, 3 * std::sqrt(0.1875 / draws));
}

TEST(ZeroSet, CycleEightAntipodalEvent) {
  auto m = cycle(8);
  Engine engine = make_engine(7);
  const int draws = 10000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    auto p = padded_partition(m, 2.0, engine);
    auto z = zero_set_from_partition(p, engine);
    const bool y_in = std::binary_search(z.begin(), z.end(), 4);
    if (y_in && m.distance_to_set(0, z) >= p.padding[0]) ++hits;
  }
  EXPECT_GE(hits / double(draws), 0.25 - 3 * std::sqrt(0.1875 / draws));
}

TEST(Alpha, TwoPoints) {
  EXPECT_LE(estimate_alpha(two_points(1.0), 200, 8), 2.0);
  EXPECT_LE(estimate_alpha(two_points(5.0), 200, 8), 2.0);
}

TEST(Alpha, UniformIsFinite) {
  double a = estimate_alpha(uniform(6), 200, 9);
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_GE(a, 1.0);
}

TEST(Alpha, CubeFourBelowLogBound) {
  double a = estimate_alpha(hypercube(4), 1000, 10);
  EXPECT_LE(a, 8.0 * std::log(16.0));
  // on the grid 2^(j/8)
  double j = 8.0 * std::log2(a);
  EXPECT_NEAR(j, std::round(j), 1e-9);
}

TEST(Alpha, DeterministicAcrossThreads) {
  set_thread_count(1);
  double a = estimate_alpha(cycle(8), 300, 11);
  set_thread_count(3);
  double b = estimate_alpha(cycle(8), 300, 11);
  set_thread_count(1);
  EXPECT_EQ(a, b);
}

TEST(Zeta, AlwaysFullSetIsInfinite) {
  auto m = cycle(4);
  ZeroSetDistribution dist(ZeroSetKind::Partition, 1.0, 1, [](Engine&) {
    return PointSet{0, 1, 2, 3};
  });
  auto est = estimate_zeta(m, dist, 0.5, 100);
  EXPECT_TRUE(std::isinf(est.zeta));
}

TEST(Zeta, AlwaysSingletonOfTwoPoints) {
  auto m = two_points(2.0);
  ZeroSetDistribution dist(ZeroSetKind::Partition, 2.0, 1, [](Engine&) { return PointSet{1}; });
  auto est = estimate_zeta(m, dist, 1.0, 100);
  ASSERT_EQ(est.pairs.size(), 2u);
  const auto& forward = est.pairs[0].x == 0 ? est.pairs[0] : est.pairs[1];
  const auto& reverse = est.pairs[0].x == 0 ? est.pairs[1] : est.pairs[0];
  EXPECT_EQ(forward.zeta, 1.0);
  EXPECT_EQ(forward.empirical_p, 1.0);
  // x = 0 is never emitted, so the reverse pair never spreads
  EXPECT_TRUE(std::isinf(reverse.zeta));
}

TEST(Zeta, NeedsSeparatedPairsAndSamples) {
  auto m = cycle(4);
  auto dist = partition_zero_sets(m, 5.0, 1);
  EXPECT_THROW(estimate_zeta(m, dist, 0.1, 200), Error);
  auto ok = partition_zero_sets(m, 1.0, 1);
  EXPECT_THROW(estimate_zeta(m, ok, 0.1, 50), Error);
}

TEST(Zeta, CycleEightPartitionBelowAlpha) {
  auto m = cycle(8);
  const int samples = 5000;
  const double alpha = estimate_alpha(m, 1000, 12);
  const double p = 0.125 - 3 * std::sqrt(0.125 * 0.875 / samples);
  auto est = estimate_zeta(m, partition_zero_sets(m, 4.0, 13), p, samples);
  EXPECT_LE(est.zeta, alpha);
  for (const auto& row : est.pairs) EXPECT_GE(row.empirical_p, p);
}

TEST(Zeta, DrawsIndependentOfThreadCount) {
  auto m = hypercube(3);
  auto dist = partition_zero_sets(m, 2.0, 14);
  set_thread_count(1);
  auto a = dist.draw_many(64);
  set_thread_count(4);
  auto b = dist.draw_many(64);
  set_thread_count(1);
  EXPECT_EQ(a, b);
  EXPECT_EQ(dist.draw(17), a[17]);
}

TEST(Zeta, SupportRestrictsZeroSets) {
  auto m = cycle(8);
  PointSet support{1, 3, 5, 6};
  auto dist = partition_zero_sets(m, 2.0, 15, support);
  for (const auto& z : dist.draw_many(200))
    for (int v : z) EXPECT_TRUE(std::binary_search(support.begin(), support.end(), v));
}

TEST(Arv, RejectsNonNegativeType) {
  auto m = shortest_path_metric(complete_bipartite_graph(3, 2));
  EXPECT_THROW(
      {
        try {
          arv_zero_set_family(m, 1.0, {}, 1);
        } catch (const Error& e) {
          EXPECT_EQ(e.kind(), ErrorKind::NotNegativeType);
          throw;
        }
      },
      Error);
}

TEST(Arv, TwoPointsEmitSingletonsOrNothing) {
  auto m = two_points(1.0);
  auto dist = arv_zero_set_family(m, 1.0, {}, 16);
  std::map<PointSet, int> seen;
  for (const auto& z : dist.draw_many(400)) ++seen[z];
  for (const auto& [z, c] : seen) EXPECT_LE(z.size(), 1u);

  // at d = delta the pair sits exactly at the pruning distance delta/sqrt(log2 2);
  // slightly farther apart it survives and both singletons occur
  auto far = two_points(1.5);
  seen.clear();
  for (const auto& z : arv_zero_set_family(far, 1.0, {}, 16).draw_many(400)) ++seen[z];
  EXPECT_EQ(seen.size(), 3u);
  for (const auto& [z, c] : seen) EXPECT_LE(z.size(), 1u);
}

TEST(Arv, NoSeparatedPairsEmitsUnprunedLeft) {
  auto m = uniform(5);
  ArvFamily family(m, 100.0, {}, 17);
  EXPECT_TRUE(family.separated_pairs_empty());
  Engine engine = make_engine(18);
  for (int i = 0; i < 100; ++i) {
    auto s = family.split(0, family.random_direction(engine));
    EXPECT_EQ(s.emitted, s.left);
  }
}

TEST(Arv, SplitsReplayThresholdDefinitions) {
  auto m = hypercube(4);
  ArvFamily family(m, 2.0, {}, 19);
  EXPECT_EQ(family.weight_count(), 1 + 4);
  for (int x = 0; x < m.size(); ++x)
    for (int y = x + 1; y < m.size(); ++y) {
      const double r = std::min(std::sqrt(2.0), std::sqrt(m(x, y)));
      const double g = family.image().distance(x, y);
      EXPECT_GE(g, 0.5 * r - 1e-9);
      EXPECT_LE(g, r + 1e-9);
    }
  Engine engine = make_engine(20);
  for (int i = 0; i < 200; ++i) {
    const int k = i % family.weight_count();
    const Eigen::VectorXd u = family.random_direction(engine);
    EXPECT_NEAR(u.norm(), 1.0, 1e-12);
    auto s = family.split(k, u);
    const Eigen::VectorXd proj = family.image().coords * u.head(family.image().dim());
    for (int x = 0; x < m.size(); ++x) {
      const bool l = std::binary_search(s.left.begin(), s.left.end(), x);
      const bool r = std::binary_search(s.right.begin(), s.right.end(), x);
      EXPECT_EQ(l, proj(x) <= -family.threshold());
      EXPECT_EQ(r, proj(x) >= family.threshold());
    }
    EXPECT_TRUE(std::includes(s.left.begin(), s.left.end(), s.left_pruned.begin(),
                              s.left_pruned.end()));
    EXPECT_TRUE(std::includes(s.right.begin(), s.right.end(), s.right_pruned.begin(),
                              s.right_pruned.end()));
    EXPECT_EQ(s.emitted, s.left_pruned);
    // replay is exact
    EXPECT_EQ(family.split(k, u).emitted, s.emitted);
  }
}

TEST(Arv, PrunedSidesHaveNoSurvivingClosePair) {
  auto m = random_l1(24, 3, 21);
  const double delta = 1.0;
  ArvFamily family(m, delta, {}, 22);
  Engine engine = make_engine(23);
  for (int i = 0; i < 100; ++i) {
    auto s = family.split(i % family.weight_count(), family.random_direction(engine));
    for (int a : s.left_pruned)
      for (int b : s.right_pruned) EXPECT_GT(m(a, b), family.prune_distance());
  }
}

TEST(Arv, WeightsStartAtNFourthAndOnlyHalve) {
  auto m = cycle(6);
  ArvFamily family(m, 2.0, {}, 24);
  const std::int64_t n4 = 6 * 6 * 6 * 6;
  for (int k = 0; k < family.weight_count(); ++k) {
    const auto& w = family.weights(k);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        EXPECT_EQ(w[i * 6 + j], w[j * 6 + i]);
        if (k == 0) EXPECT_EQ(w[i * 6 + j], m(i, j) >= 2.0 / 16 ? n4 : 0);
        if (k > 0) {
          const auto prev = family.weights(k - 1)[i * 6 + j];
          EXPECT_TRUE(w[i * 6 + j] == prev || 2 * w[i * 6 + j] == prev);
        }
      }
  }
}

TEST(Arv, CubeSixSpreadingIsFinite) {
  auto m = hypercube(6);
  auto est = estimate_zeta(m, arv_zero_set_family(m, 4.0, {}, 25), 0.05, 2000);
  EXPECT_TRUE(std::isfinite(est.zeta));
  EXPECT_GT(est.zeta, 0.0);
}

TEST(Arv, DeterministicAcrossThreads) {
  auto m = hypercube(4);
  set_thread_count(1);
  auto a = arv_zero_set_family(m, 2.0, {}, 26).draw_many(50);
  set_thread_count(4);
  auto b = arv_zero_set_family(m, 2.0, {}, 26).draw_many(50);
  set_thread_count(1);
  EXPECT_EQ(a, b);
}
