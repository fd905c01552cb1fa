#include "mdesc/cut.hpp"
#include "mdesc/error.hpp"
#include "mdesc/generate.hpp"
#include "mdesc/parallel.hpp"
#include "mdesc/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace mdesc;

namespace {

CutInstance c4() { return uniform_demand_instance(cycle_graph(4)); }

Cut from_set(int n, std::initializer_list<int> s) {
  Cut c(n, 0);
  for (int v : s) c[v] = 1;
  return c;
}

CutInstance random_instance(int n, std::uint64_t seed) {
  Engine e = make_engine(seed);
  Eigen::MatrixXd w_n = Eigen::MatrixXd::Zero(n, n), w_d = Eigen::MatrixXd::Zero(n, n);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      w_n(u, v) = w_n(v, u) = bernoulli(e, 0.5) ? static_cast<double>(1 + uniform_index(e, 3)) : 0.0;
      w_d(u, v) = w_d(v, u) = bernoulli(e, 0.6) ? static_cast<double>(1 + uniform_index(e, 3)) : 0.0;
    }
  w_d(0, 1) = w_d(1, 0) = 1.0;
  return make_cut_instance(w_n, w_d);
}

// independent oracle: every mask, sparsity evaluated from scratch
double naive_optimum(const CutInstance& inst) {
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask + 1 < (1 << inst.n); ++mask) {
    double cap = 0, dem = 0;
    for (int u = 0; u < inst.n; ++u)
      for (int v = 0; v < inst.n; ++v)
        if ((mask >> u & 1) && !(mask >> v & 1)) {
          cap += inst.w_n(u, v);
          dem += inst.w_d(u, v);
        }
    if (dem > 0) best = std::min(best, cap / dem);
  }
  return best;
}

}  // namespace

TEST(Instance, Validation) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(0, 1) = 1;
  EXPECT_THROW(make_cut_instance(a, a), Error);
  try {
    make_cut_instance(Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ZeroDemand);
  }
}

TEST(Instance, DemandSupport) {
  Eigen::MatrixXd w_d = Eigen::MatrixXd::Zero(4, 4);
  w_d(1, 3) = w_d(3, 1) = 2;
  const CutInstance inst = make_cut_instance(Eigen::MatrixXd::Zero(4, 4), w_d);
  EXPECT_EQ(inst.demand_support(), (PointSet{1, 3}));
}

TEST(Sparsity, C4Examples) {
  EXPECT_DOUBLE_EQ(sparsity(c4(), from_set(4, {0})), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(sparsity(c4(), from_set(4, {0, 1})), 0.5);
  EXPECT_DOUBLE_EQ(sparsity(c4(), from_set(4, {0, 2})), 1.0);
}

TEST(Sparsity, ComplementSymmetry) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CutInstance inst = random_instance(6, seed);
    Engine e = make_engine(seed + 100);
    Cut s(6, 0);
    for (auto& c : s) c = bernoulli(e, 0.5);
    s[0] = 1;
    s[5] = 0;
    Cut t = s;
    for (auto& c : t) c ^= 1;
    EXPECT_DOUBLE_EQ(sparsity(inst, s), sparsity(inst, t));
  }
}

TEST(Sparsity, Errors) {
  EXPECT_THROW(sparsity(c4(), Cut(4, 0)), Error);
  EXPECT_THROW(sparsity(c4(), Cut(4, 1)), Error);
  EXPECT_THROW(sparsity(c4(), Cut(3, 0)), Error);
}

TEST(Sparsity, NoCrossingDemandIsInfinite) {
  Eigen::MatrixXd w_d = Eigen::MatrixXd::Zero(3, 3);
  w_d(0, 1) = w_d(1, 0) = 1;
  const CutInstance inst = make_cut_instance(Eigen::MatrixXd::Zero(3, 3), w_d);
  const Cut s = from_set(3, {2});
  EXPECT_TRUE(std::isinf(sparsity(inst, s)));
  const CutWeights w = cut_weights(inst, s);
  EXPECT_EQ(w.capacity, 0.0);
  EXPECT_EQ(w.demand, 0.0);
}

TEST(BruteForce, TwoVertices) {
  Eigen::MatrixXd w(2, 2);
  w << 0, 1, 1, 0;
  const auto r = brute_force_optimum(make_cut_instance(w, w));
  EXPECT_DOUBLE_EQ(r.phi, 1.0);
}

TEST(BruteForce, C4AdjacentPair) {
  const auto r = brute_force_optimum(c4());
  EXPECT_DOUBLE_EQ(r.phi, 0.5);
  EXPECT_EQ(r.cut, from_set(4, {0, 1}));
}

TEST(BruteForce, StarTieBreak) {
  Graph star{4, {{0, 1}, {0, 2}, {0, 3}}};
  const auto r = brute_force_optimum(uniform_demand_instance(star));
  EXPECT_DOUBLE_EQ(r.phi, 1.0 / 3.0);
  EXPECT_EQ(r.cut, from_set(4, {0, 1, 2}));
}

TEST(BruteForce, MatchesNaiveEnumeration) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const CutInstance inst = random_instance(2 + static_cast<int>(seed % 8), seed);
    const auto r = brute_force_optimum(inst);
    EXPECT_NEAR(r.phi, naive_optimum(inst), 1e-12) << seed;
    EXPECT_EQ(sparsity(inst, r.cut), r.phi);
  }
}

TEST(BruteForce, TooLarge) {
  try {
    brute_force_optimum(uniform_demand_instance(path_graph(25)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooLarge);
  }
}

TEST(Decomposition, AllEqualIsEmpty) {
  EXPECT_TRUE(cut_decomposition(Eigen::MatrixXd::Constant(5, 3, 2.0)).cuts.empty());
}

TEST(Decomposition, LineExample) {
  Eigen::MatrixXd p(3, 1);
  p << 0, 1, 3;
  const auto d = cut_decomposition(p);
  ASSERT_EQ(d.cuts.size(), 2u);
  EXPECT_EQ(d.cuts[0].alpha, 1.0);
  EXPECT_EQ(d.cuts[0].side, from_set(3, {0}));
  EXPECT_EQ(d.cuts[1].alpha, 2.0);
  EXPECT_EQ(d.cuts[1].side, from_set(3, {0, 1}));
  EXPECT_EQ(decomposition_distance(d, 0, 1), 1.0);
  EXPECT_EQ(decomposition_distance(d, 1, 2), 2.0);
  EXPECT_EQ(decomposition_distance(d, 0, 2), 3.0);
}

TEST(Decomposition, ReconstructsL1) {
  Engine e = make_engine(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(uniform_index(e, 10));
    const int k = 1 + static_cast<int>(uniform_index(e, 5));
    Eigen::MatrixXd p(n, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) p(i, j) = uniform01(e);
    const auto d = cut_decomposition(p);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
        EXPECT_NEAR(decomposition_distance(d, x, y), (p.row(x) - p.row(y)).lpNorm<1>(), 1e-12);
  }
}

TEST(Round, TwoVertices) {
  Eigen::MatrixXd w_n(2, 2), w_d(2, 2);
  w_n << 0, 3, 3, 0;
  w_d << 0, 2, 2, 0;
  const auto r = round_sdp(make_cut_instance(w_n, w_d), {}, 1);
  EXPECT_DOUBLE_EQ(r.phi, 1.5);
}

TEST(Round, C4) {
  int optimal = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = round_sdp(c4(), {}, seed);
    EXPECT_LE(r.phi, 2.0 / 3.0 + 1e-12);
    optimal += r.phi == 0.5;
  }
  EXPECT_GE(optimal, 16);
}

TEST(Round, CandidatesAndAccounting) {
  for (const Graph& g : {cycle_graph(6), path_graph(6), grid_graph(2, 3)}) {
    const CutInstance inst = uniform_demand_instance(g);
    const auto r = round_sdp(inst, {}, 3);
    const double phi_star = brute_force_optimum(inst).phi;
    EXPECT_LE(r.trace.sdp_value, phi_star + 1e-4);
    EXPECT_LE(phi_star, r.phi + 1e-12);
    EXPECT_EQ(r.phi, sparsity(inst, r.cut));
    EXPECT_EQ(r.trace.candidates.size(), static_cast<std::size_t>(r.trace.directions * (g.n - 1)));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : r.trace.candidates)
      if (!c.degenerate) best = std::min(best, c.phi);
    EXPECT_EQ(best, r.phi);
    EXPECT_TRUE(r.trace.accounting_holds);
    EXPECT_GE(r.trace.lambda, 1.0);
  }
}

TEST(Round, DirectionCount) {
  const auto r = round_sdp(uniform_demand_instance(cycle_graph(6)), {}, 0);
  EXPECT_EQ(r.trace.directions, static_cast<int>(std::ceil(20 * std::log2(6.0))));
}

TEST(Round, IndependentOfThreadCount) {
  const CutInstance inst = uniform_demand_instance(grid_graph(2, 3));
  set_thread_count(1);
  const auto a = round_sdp(inst, {}, 9);
  set_thread_count(4);
  const auto b = round_sdp(inst, {}, 9);
  set_thread_count(0);
  EXPECT_EQ(a.cut, b.cut);
  ASSERT_EQ(a.trace.candidates.size(), b.trace.candidates.size());
  for (std::size_t i = 0; i < a.trace.candidates.size(); ++i)
    EXPECT_EQ(a.trace.candidates[i].phi, b.trace.candidates[i].phi);
}
