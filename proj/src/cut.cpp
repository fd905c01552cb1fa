#include "mdesc/cut.hpp"

#include "mdesc/error.hpp"
#include "mdesc/parallel.hpp"
#include "mdesc/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdesc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_weights(const Eigen::MatrixXd& w, int n, const char* name) {
  if (w.rows() != n || w.cols() != n)
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be n x n");
  for (int u = 0; u < n; ++u) {
    if (w(u, u) != 0.0) throw Error(ErrorKind::InvalidArgument, std::string(name) + " diagonal must be 0");
    for (int v = 0; v < n; ++v) {
      if (!(w(u, v) >= 0.0) || !std::isfinite(w(u, v)))
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " entries must be finite and >= 0");
      if (w(u, v) != w(v, u))
        throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be symmetric");
    }
  }
}

void check_cut(const CutInstance& instance, const Cut& side) {
  if (static_cast<int>(side.size()) != instance.n)
    throw Error(ErrorKind::InvalidArgument, "cut size does not match the instance");
}

std::vector<int> members(const Cut& side) {
  std::vector<int> s;
  for (int v = 0; v < static_cast<int>(side.size()); ++v)
    if (side[v]) s.push_back(v);
  return s;
}

}  // namespace

PointSet CutInstance::demand_support() const {
  PointSet u;
  for (int v = 0; v < n; ++v)
    if ((w_d.row(v).array() > 0.0).any()) u.push_back(v);
  return u;
}

CutInstance make_cut_instance(Eigen::MatrixXd w_n, Eigen::MatrixXd w_d) {
  const int n = static_cast<int>(w_n.rows());
  check_weights(w_n, n, "w_N");
  check_weights(w_d, n, "w_D");
  if (n == 0 || w_d.maxCoeff() <= 0.0) throw Error(ErrorKind::ZeroDemand, "w_D is identically zero");
  return {n, std::move(w_n), std::move(w_d)};
}

CutInstance uniform_demand_instance(const Graph& graph) {
  const int n = graph.n;
  Eigen::MatrixXd w_n = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : graph.edges) {
    if (e.u == e.v) continue;
    w_n(e.u, e.v) += e.weight;
    w_n(e.v, e.u) += e.weight;
  }
  Eigen::MatrixXd w_d = Eigen::MatrixXd::Ones(n, n);
  w_d.diagonal().setZero();
  return make_cut_instance(std::move(w_n), std::move(w_d));
}

CutWeights cut_weights(const CutInstance& instance, const Cut& side) {
  check_cut(instance, side);
  CutWeights w;
  for (int u = 0; u < instance.n; ++u) {
    if (!side[u]) continue;
    for (int v = 0; v < instance.n; ++v) {
      if (side[v]) continue;
      w.capacity += instance.w_n(u, v);
      w.demand += instance.w_d(u, v);
    }
  }
  return w;
}

double sparsity(const CutInstance& instance, const Cut& side) {
  check_cut(instance, side);
  const auto count = std::count(side.begin(), side.end(), 1);
  if (count == 0 || count == instance.n)
    throw Error(ErrorKind::EmptyOrFullCut, "sparsity needs a proper nonempty cut");
  const CutWeights w = cut_weights(instance, side);
  return w.demand > 0.0 ? w.capacity / w.demand : kInf;
}

BruteForceResult brute_force_optimum(const CutInstance& instance) {
  const int n = instance.n;
  if (n > 24) throw Error(ErrorKind::TooLarge, "brute force is limited to n <= 24");
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "brute force needs at least two vertices");

  // S always contains vertex 0, which makes it the lexicographically smaller
  // side; Gray code over vertices 1..n-1 flips one vertex per step
  Cut side(n, 0);
  side[0] = 1;
  double cap = instance.w_n.row(0).sum();
  double dem = instance.w_d.row(0).sum();
  BruteForceResult best{{}, kInf};
  const std::uint64_t steps = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 0; k < steps; ++k) {
    if (k > 0) {
      const int v = 1 + std::countr_zero(k);
      const double sign = side[v] ? 1.0 : -1.0;  // leaving S: edges to S start crossing
      for (int u = 0; u < n; ++u) {
        if (u == v) continue;
        const double s = side[u] ? sign : -sign;
        cap += s * instance.w_n(v, u);
        dem += s * instance.w_d(v, u);
      }
      side[v] ^= 1;
    }
    if (std::count(side.begin(), side.end(), 1) == n) continue;
    const double approx = dem > 0.0 ? cap / dem : kInf;
    if (!(approx <= best.phi * (1.0 + 1e-9) + 1e-300) && best.phi != kInf) continue;
    const double phi = sparsity(instance, side);
    if (best.cut.empty() || phi < best.phi ||
        (phi == best.phi && std::ranges::lexicographical_compare(members(side), members(best.cut))))
      best = {side, phi};
  }
  return best;
}

CutDecomposition cut_decomposition(const Eigen::MatrixXd& points) {
  const int n = static_cast<int>(points.rows());
  CutDecomposition out;
  std::vector<int> order(n);
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return points(a, c) < points(b, c); });
    Cut side(n, 0);
    for (int k = 0; k + 1 < n; ++k) {
      side[order[k]] = 1;
      const double gap = points(order[k + 1], c) - points(order[k], c);
      if (gap > 0.0) out.cuts.push_back({gap, side});
    }
  }
  return out;
}

double decomposition_distance(const CutDecomposition& d, int x, int y) {
  double sum = 0.0;
  for (const auto& c : d.cuts)
    if (c.side[x] != c.side[y]) sum += c.alpha;
  return sum;
}

RoundResult round_sdp(const CutInstance& instance, const RoundConfig& config, std::uint64_t seed) {
  const int n = instance.n;
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "rounding needs at least two vertices");
  RoundResult result;
  RoundTrace& trace = result.trace;

  const SparsestCutRelaxation relax = sparsest_cut_relaxation(instance, config.sdp);
  trace.sdp_value = relax.value;
  const MetricSpace& dstar = relax.metric;
  const PointSet support = instance.demand_support();
  const MinDistortionResult md = min_distortion_embedding(dstar, support, config.sdp);
  trace.epsilon = md.epsilon;

  Eigen::MatrixXd f = md.embedding.coords();
  const double zero = 1e-12 * std::max(dstar.diameter(), 1e-300);
  double lip = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (dstar(u, v) > zero) lip = std::max(lip, (f.row(u) - f.row(v)).norm() / dstar(u, v));
  if (lip > 1.0) {
    trace.lipschitz_rescale = 1.0 / lip;
    f *= trace.lipschitz_rescale;
  }

  const int m = config.directions > 0
                    ? config.directions
                    : std::max(1, static_cast<int>(std::ceil(20.0 * std::log2(n) - 1e-9)));
  trace.directions = m;
  Engine engine = make_engine(derive_seed(seed, "round/directions"));
  Eigen::MatrixXd beta(f.cols(), m);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) {
      const double s = bernoulli(engine, 0.5) ? 1.0 : -1.0;
      if (k < f.cols()) beta(k, i) = s;
    }
  const Eigen::MatrixXd proj = f * beta;

  std::vector<std::vector<SweepCandidate>> per_direction(m);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t i) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return proj(a, i) < proj(b, i); });
    Cut side(n, 0);
    auto& out = per_direction[i];
    for (int k = 1; k < n; ++k) {
      side[order[k - 1]] = 1;
      const CutWeights w = cut_weights(instance, side);
      SweepCandidate c{static_cast<int>(i), k, kInf, w.demand <= 0.0};
      if (!c.degenerate) c.phi = w.capacity / w.demand;
      out.push_back(c);
    }
  });

  const SweepCandidate* best = nullptr;
  for (const auto& list : per_direction)
    for (const auto& c : list) {
      trace.candidates.push_back(c);
      if (!c.degenerate && (!best || c.phi < best->phi)) best = &c;
    }
  if (!best) throw Error(ErrorKind::ZeroDemand, "no sweep cut separates any demand");
  {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return proj(a, best->direction) < proj(b, best->direction);
    });
    result.cut.assign(n, 0);
    for (int k = 0; k < best->prefix; ++k) result.cut[order[k]] = 1;
    result.phi = best->phi;
  }

  const CutDecomposition decomposition = cut_decomposition(proj);
  std::vector<char> in_support(n, 0);
  for (int v : support) in_support[v] = 1;
  double expand = 0.0, contract = kInf;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      if (dstar(u, v) <= zero) continue;
      const double ratio = decomposition_distance(decomposition, u, v) / dstar(u, v);
      expand = std::max(expand, ratio);
      if (in_support[u] && in_support[v]) contract = std::min(contract, ratio);
    }
  trace.lambda = contract > 0.0 ? expand / contract : kInf;
  const double tol = config.sdp.tol;
  trace.accounting_holds =
      trace.sdp_value > 0.0 ? result.phi / trace.sdp_value <= trace.lambda * (1.0 + tol) : true;
  return result;
}

}  // namespace mdesc
