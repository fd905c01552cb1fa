#include "mdesc/sdp.hpp"

#include "mdesc/cut.hpp"
#include "mdesc/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace mdesc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;

// svec layout: pairs (i <= j) row by row; off-diagonal entries carry sqrt(2)
// so that <svec A, svec B> = <A, B>_F
int svec_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& g) {
  const int n = static_cast<int>(g.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) v(svec_index(n, i, j)) = i == j ? g(i, i) : kSqrt2 * g(i, j);
  return v;
}

Eigen::MatrixXd unsvec(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double x = v(svec_index(n, i, j));
      g(i, j) = g(j, i) = i == j ? x : x / kSqrt2;
    }
  return g;
}

Eigen::VectorXd project_psd(const Eigen::VectorXd& v, int n) {
  if (n == 0) return v;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(unsvec(v, n));
  const Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  return svec(eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose());
}

double max_eigenvalue(const Eigen::VectorXd& v, int n) {
  if (n == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(unsvec(v, n), Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(n - 1);
}

double term_value(const GramTerm& t, const Eigen::MatrixXd& g) { return t.coef * g(t.i, t.j); }

double constraint_value(const SdpConstraint& c, const Eigen::MatrixXd& g, double s) {
  double v = c.scalar_coef * s;
  for (const auto& t : c.terms) v += term_value(t, g);
  return v;
}

// coefficient of svec entry for a GramTerm
double svec_coef(const GramTerm& t) { return t.i == t.j ? t.coef : t.coef / kSqrt2; }

void check_terms(const std::vector<GramTerm>& terms, int n) {
  for (const auto& t : terms)
    if (t.i < 0 || t.j < 0 || t.i >= n || t.j >= n)
      throw Error(ErrorKind::InvalidArgument, "SDP term references an invalid index");
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

SdpConstraint sdp_equal(std::vector<GramTerm> terms, double rhs, double scalar_coef) {
  return {std::move(terms), scalar_coef, rhs, rhs};
}

SdpConstraint sdp_at_most(std::vector<GramTerm> terms, double rhs, double scalar_coef) {
  return {std::move(terms), scalar_coef, -kInf, rhs};
}

SdpConstraint sdp_at_least(std::vector<GramTerm> terms, double rhs, double scalar_coef) {
  return {std::move(terms), scalar_coef, rhs, kInf};
}

std::vector<GramTerm> squared_distance_terms(int u, int v, double coef) {
  return {{u, u, coef}, {v, v, coef}, {u, v, -2.0 * coef}};
}

std::string to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIterations: return "max-iterations";
    case SdpStatus::Infeasible: return "infeasible";
  }
  return "unknown";
}

PointConfig factor_gram(const Eigen::MatrixXd& gram) {
  const int n = static_cast<int>(gram.rows());
  if (n == 0) return {Eigen::MatrixXd(0, 0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const double cut = 1e-9 * std::max(gram.trace(), 0.0);
  std::vector<int> kept;
  for (int k = n - 1; k >= 0; --k)
    if (eig.eigenvalues()(k) > cut) kept.push_back(k);
  Eigen::MatrixXd p(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c)
    p.col(c) = eig.eigenvectors().col(kept[c]) * std::sqrt(eig.eigenvalues()(kept[c]));
  return {std::move(p)};
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options, SdpWarmStart* warm) {
  const int n = problem.n;
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "SDP dimension must be nonnegative");
  check_terms(problem.objective, n);
  for (const auto& c : problem.constraints) {
    check_terms(c.terms, n);
    if (c.lower > c.upper) throw Error(ErrorKind::Infeasible, "constraint with lower > upper");
  }
  const int nsv = n * (n + 1) / 2;
  const int nv = nsv + (problem.has_scalar ? 1 : 0);
  const int m = static_cast<int>(problem.constraints.size());

  // row-normalized constraint matrix
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd lo(m), hi(m);
  for (int r = 0; r < m; ++r) {
    const SdpConstraint& c = problem.constraints[r];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(nv);
    for (const auto& t : c.terms) row(svec_index(n, t.i, t.j)) += svec_coef(t);
    if (problem.has_scalar) row(nsv) += c.scalar_coef;
    double norm = row.norm();
    if (norm == 0.0) {
      if (c.lower > 0.0 || c.upper < 0.0)
        throw Error(ErrorKind::Infeasible, "empty constraint with nonzero bound");
      norm = 1.0;
    }
    for (int k = 0; k < nv; ++k)
      if (row(k) != 0.0) triplets.emplace_back(r, k, row(k) / norm);
    lo(r) = c.lower / norm;
    hi(r) = c.upper / norm;
  }
  Eigen::SparseMatrix<double> a(m, nv);
  a.setFromTriplets(triplets.begin(), triplets.end());
  const Eigen::SparseMatrix<double> at = a.transpose();

  Eigen::VectorXd q = Eigen::VectorXd::Zero(nv);
  for (const auto& t : problem.objective) q(svec_index(n, t.i, t.j)) -= svec_coef(t);
  if (problem.has_scalar) q(nsv) -= problem.objective_scalar;
  const double cost_scale = std::max(inf_norm(q), 1e-300);
  const double cost_unit = inf_norm(q) > 0.0 ? cost_scale : 1.0;
  q /= cost_unit;

  const double sigma = 1e-6, alpha = 1.6;
  double rho = 0.1;
  auto row_rho = [&](int r) { return lo(r) == hi(r) ? 1e3 * rho : rho; };

  // z, y layout: [psd block (nsv); constraint rows (m)]
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nv), z = Eigen::VectorXd::Zero(nsv + m),
                  y = Eigen::VectorXd::Zero(nsv + m);
  if (warm && warm->x.size() == nv && warm->z.size() >= nsv && warm->z.size() <= nsv + m &&
      warm->y.size() == warm->z.size()) {
    x = warm->x;
    const Eigen::Index old = warm->z.size();
    z.head(old) = warm->z;
    y.head(old) = warm->y;
    const Eigen::VectorXd ax = a * x;
    for (Eigen::Index r = old - nsv; r < m; ++r) z(nsv + r) = std::clamp(ax(r), lo(r), hi(r));
  }

  // support function of the box, ignoring multipliers of the wrong sign on
  // infinite bounds (they vanish at convergence)
  auto support_term = [&](int r, double yr) {
    if (yr > 0.0 && std::isfinite(hi(r))) return hi(r) * yr;
    if (yr < 0.0 && std::isfinite(lo(r))) return lo(r) * yr;
    return 0.0;
  };

  Eigen::LLT<Eigen::MatrixXd> llt;
  auto factor = [&] {
    Eigen::VectorXd w(m);
    for (int r = 0; r < m; ++r) w(r) = row_rho(r);
    Eigen::MatrixXd k = Eigen::MatrixXd(at * w.asDiagonal() * a);
    k.diagonal().array() += sigma;
    k.diagonal().head(nsv).array() += rho;
    llt.compute(k);
    if (llt.info() != Eigen::Success)
      throw Error(ErrorKind::EigDecompositionFailure, "ADMM system factorization failed");
  };
  factor();

  SdpSolution sol;
  sol.status = SdpStatus::MaxIterations;
  Eigen::VectorXd y_prev = y;
  const int check_every = 25;
  int iter = 0;
  for (iter = 1; iter <= options.max_iter; ++iter) {
    Eigen::VectorXd rhs = sigma * x - q;
    Eigen::VectorXd wz(m);
    for (int r = 0; r < m; ++r) wz(r) = row_rho(r) * z(nsv + r) - y(nsv + r);
    rhs += at * wz;
    rhs.head(nsv) += rho * z.head(nsv) - y.head(nsv);
    const Eigen::VectorXd xt = llt.solve(rhs);
    Eigen::VectorXd zt(nsv + m);
    zt.head(nsv) = xt.head(nsv);
    zt.tail(m) = a * xt;
    x = alpha * xt + (1 - alpha) * x;
    const Eigen::VectorXd zhat = alpha * zt + (1 - alpha) * z;

    Eigen::VectorXd znew(nsv + m);
    znew.head(nsv) = project_psd(zhat.head(nsv) + y.head(nsv) / rho, n);
    for (int r = 0; r < m; ++r)
      znew(nsv + r) = std::clamp(zhat(nsv + r) + y(nsv + r) / row_rho(r), lo(r), hi(r));
    y.head(nsv) += rho * (zhat.head(nsv) - znew.head(nsv));
    for (int r = 0; r < m; ++r) y(nsv + r) += row_rho(r) * (zhat(nsv + r) - znew(nsv + r));
    z = std::move(znew);

    if (iter % check_every != 0 && iter != options.max_iter) continue;

    Eigen::VectorXd mx(nsv + m);
    mx.head(nsv) = x.head(nsv);
    mx.tail(m) = a * x;
    Eigen::VectorXd mty = at * y.tail(m);
    mty.head(nsv) += y.head(nsv);
    const double r_prim = inf_norm(mx - z);
    const double r_dual = inf_norm(q + mty);
    const double prim_scale = std::max(inf_norm(mx), inf_norm(z));
    const double dual_scale = std::max(inf_norm(mty), inf_norm(q));
    double dual_obj = 0.0;
    for (int r = 0; r < m; ++r) dual_obj -= support_term(r, y(nsv + r));
    const double prim_obj = q.dot(x);
    const double gap = std::abs(prim_obj - dual_obj);
    if (r_prim <= options.tol * (1.0 + prim_scale) && r_dual <= options.tol * (1.0 + dual_scale) &&
        gap <= options.tol * (1.0 + std::max(std::abs(prim_obj), std::abs(dual_obj)))) {
      sol.status = SdpStatus::Optimal;
      break;
    }

    // primal infeasibility certificate from the dual increment
    const Eigen::VectorXd dy = y - y_prev;
    const double dy_norm = inf_norm(dy);
    if (dy_norm > 1e-10) {
      Eigen::VectorXd mtdy = at * dy.tail(m);
      mtdy.head(nsv) += dy.head(nsv);
      double support = 0.0;
      for (int r = 0; r < m && std::isfinite(support); ++r) {
        const double d = dy(nsv + r);
        if (d > 0.0) support += std::isfinite(hi(r)) ? hi(r) * d : kInf;
        if (d < 0.0) support += std::isfinite(lo(r)) ? lo(r) * d : kInf;
      }
      const double eps_inf = 1e-5 * dy_norm;
      if (inf_norm(mtdy) <= eps_inf && support < -eps_inf &&
          max_eigenvalue(dy.head(nsv), n) <= eps_inf) {
        sol.status = SdpStatus::Infeasible;
        break;
      }
    }
    y_prev = y;

    // penalty adaptation
    if (r_prim > 0.0 && r_dual > 0.0) {
      const double ratio = std::sqrt((r_prim / (prim_scale + 1e-12)) / (r_dual / (dual_scale + 1e-12)));
      if (ratio > 10.0 || ratio < 0.1) {
        rho = std::clamp(rho * ratio, 1e-6, 1e6);
        factor();
      }
    }
  }
  sol.iterations = std::min(iter, options.max_iter);

  sol.gram = unsvec(z.head(nsv), n);
  sol.scalar = problem.has_scalar ? x(nsv) : 0.0;
  sol.points = factor_gram(sol.gram);
  double obj = problem.objective_scalar * sol.scalar;
  for (const auto& t : problem.objective) obj += term_value(t, sol.gram);
  sol.objective_value = obj;
  double dual_obj = 0.0;
  for (int r = 0; r < m; ++r) dual_obj -= support_term(r, y(nsv + r));
  sol.dual_bound = -dual_obj * cost_unit;
  for (const auto& c : problem.constraints) {
    const double v = constraint_value(c, sol.gram, sol.scalar);
    sol.max_violation = std::max({sol.max_violation, c.lower - v, v - c.upper});
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sol.gram, Eigen::EigenvaluesOnly);
    sol.min_eigenvalue = eig.eigenvalues()(0);
  }
  if (warm) {
    warm->x = x;
    warm->z = z;
    warm->y = y;
  }
  return sol;
}

MinDistortionResult min_distortion_embedding(const MetricSpace& y, const PointSet& subset,
                                             const SdpOptions& options) {
  const int n = y.size();
  PointSet x = subset.empty() ? all_points(n) : subset;
  std::sort(x.begin(), x.end());
  x.erase(std::unique(x.begin(), x.end()), x.end());
  if (x.empty()) throw Error(ErrorKind::EmptySet, "min_distortion_embedding needs points");
  for (int v : x)
    if (v < 0 || v >= n) throw Error(ErrorKind::InvalidArgument, "subset index out of range");

  const double scale = y.diameter() > 0.0 ? y.diameter() : 1.0;
  SdpProblem p;
  p.n = n;
  p.has_scalar = true;
  p.objective_scalar = 1.0;
  std::vector<char> in_x(n, 0);
  for (int v : x) in_x[v] = 1;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      const double d = y(u, v) / scale;
      p.constraints.push_back(sdp_at_most(squared_distance_terms(u, v), d * d));
      if (in_x[u] && in_x[v] && d > 0.0)
        p.constraints.push_back(sdp_at_least(squared_distance_terms(u, v), 0.0, -d * d));
    }
  std::vector<GramTerm> center;
  for (int u = 0; u < n; ++u)
    for (int v = u; v < n; ++v) center.push_back({u, v, u == v ? 1.0 : 2.0});
  p.constraints.push_back(sdp_equal(std::move(center), 0.0));
  p.constraints.push_back(sdp_at_most({}, 1.0, 1.0));

  MinDistortionResult r;
  r.solution = solve(p, options);
  if (r.solution.status == SdpStatus::Infeasible)
    throw Error(ErrorKind::Infeasible, "min-distortion program reported infeasible");
  r.epsilon = r.solution.scalar;
  r.distortion = r.epsilon > 0.0 ? 1.0 / std::sqrt(r.epsilon) : kInf;
  r.embedding = Embedding(r.solution.points.coords * scale, 1.0);
  return r;
}

SparsestCutRelaxation sparsest_cut_relaxation(const CutInstance& instance,
                                              const SdpOptions& options) {
  const int n = instance.n;
  if (instance.w_d.maxCoeff() <= 0.0) throw Error(ErrorKind::ZeroDemand, "no positive demand");
  const double cap_scale = instance.w_n.maxCoeff() > 0.0 ? instance.w_n.maxCoeff() : 1.0;
  const double dem_scale = instance.w_d.maxCoeff();

  SdpProblem p;
  p.n = n;
  std::vector<GramTerm> demand;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      // ordered-pair sums count each unordered pair twice
      if (instance.w_n(u, v) > 0.0)
        for (const auto& t : squared_distance_terms(u, v, -2.0 * instance.w_n(u, v) / cap_scale))
          p.objective.push_back(t);
      if (instance.w_d(u, v) > 0.0)
        for (const auto& t : squared_distance_terms(u, v, 2.0 * instance.w_d(u, v) / dem_scale))
          demand.push_back(t);
    }
  p.constraints.push_back(sdp_equal(std::move(demand), 1.0));
  std::vector<GramTerm> center;
  for (int u = 0; u < n; ++u)
    for (int v = u; v < n; ++v) center.push_back({u, v, u == v ? 1.0 : 2.0});
  p.constraints.push_back(sdp_equal(std::move(center), 0.0));

  auto squared = [&](const PointConfig& pts) {
    Eigen::MatrixXd d(n, n);
    for (int u = 0; u < n; ++u) {
      d(u, u) = 0.0;
      for (int v = u + 1; v < n; ++v) d(u, v) = d(v, u) = pts.squared_distance(u, v);
    }
    return d;
  };

  SparsestCutRelaxation out{validate_metric(Eigen::MatrixXd::Zero(1, 1)), {}, 0.0, 0, 0, {}};
  SdpWarmStart warm;
  std::vector<std::tuple<int, int, int>> active;
  Eigen::MatrixXd d;
  for (int round = 0;; ++round) {
    out.solution = solve(p, options, &warm);
    if (out.solution.status == SdpStatus::Infeasible)
      throw Error(ErrorKind::Infeasible, "sparsest cut relaxation reported infeasible");
    out.rounds = round + 1;
    d = squared(out.solution.points);
    const double limit = options.tol * std::max(d.maxCoeff(), 1e-300);
    std::vector<std::tuple<double, int, int, int>> violated;
    for (int u = 0; u < n; ++u)
      for (int v = u + 1; v < n; ++v)
        for (int w = 0; w < n; ++w) {
          if (w == u || w == v) continue;
          const double excess = d(u, v) - d(u, w) - d(w, v);
          if (excess > limit) violated.emplace_back(-excess, u, v, w);
        }
    if (violated.empty() || round + 1 >= 20) break;
    std::sort(violated.begin(), violated.end());
    const std::size_t take = std::min<std::size_t>(violated.size(), 5 * static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < take; ++i) {
      const auto [neg, u, v, w] = violated[i];
      std::vector<GramTerm> terms = squared_distance_terms(u, w);
      for (const auto& t : squared_distance_terms(w, v)) terms.push_back(t);
      for (const auto& t : squared_distance_terms(u, v, -1.0)) terms.push_back(t);
      p.constraints.push_back(sdp_at_least(std::move(terms), 0.0));
      active.emplace_back(u, v, w);
    }
  }
  out.triangle_constraints = static_cast<int>(active.size());
  out.points = out.solution.points;

  const double tri_tol = std::max(options.tol, 1e-12) * std::max(d.maxCoeff(), 1e-300) * 10.0;
  out.metric = validate_metric(d, {}, {tri_tol, true});
  if (!is_negative_type(out.metric).is_negative_type)
    throw Error(ErrorKind::NotNegativeType, "relaxation distances are not of negative type");
  double cap = 0.0, dem = 0.0;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      cap += instance.w_n(u, v) * d(u, v);
      dem += instance.w_d(u, v) * d(u, v);
    }
  out.value = dem > 0.0 ? cap / dem : kInf;
  return out;
}

}  // namespace mdesc
