#include "mdesc/embedding.hpp"

#include "mdesc/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace mdesc {

Embedding Embedding::scaled(double factor) const {
  return {coords_ * factor, lip_bound_ * std::abs(factor)};
}

Embedding direct_sum(std::span<const Embedding> parts, double scale) {
  if (parts.empty()) return {};
  const int n = parts.front().size();
  int dim = 0;
  double lip_sq = 0.0;
  for (const auto& p : parts) {
    if (p.size() != n) throw Error(ErrorKind::InvalidArgument, "direct_sum of maps on different spaces");
    dim += p.dim();
    lip_sq += p.lip_bound() * p.lip_bound();
  }
  Eigen::MatrixXd coords(n, dim);
  int col = 0;
  for (const auto& p : parts) {
    coords.middleCols(col, p.dim()) = p.coords() * scale;
    col += p.dim();
  }
  return {std::move(coords), std::abs(scale) * std::sqrt(lip_sq)};
}

Embedding direct_sum(const Embedding& a, const Embedding& b, double scale) {
  const Embedding parts[] = {a, b};
  return direct_sum(parts, scale);
}

double measured_lipschitz(const MetricSpace& m, const Embedding& e) {
  double lip = 0.0;
  for (int x = 0; x < m.size(); ++x) {
    for (int y = x + 1; y < m.size(); ++y) {
      if (m(x, y) > 0.0) lip = std::max(lip, e.distance(x, y) / m(x, y));
    }
  }
  return lip;
}

PointConfig truncation_map(const PointConfig& points, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorKind::InvalidArgument, "truncation scale must be positive");
  }
  const int n = points.size();
  if (n == 0) return {Eigen::MatrixXd(0, 1)};

  // collapse exact duplicates onto one representative
  std::vector<int> rep_of(n);
  std::vector<int> reps;
  for (int i = 0; i < n; ++i) {
    rep_of[i] = -1;
    for (std::size_t r = 0; r < reps.size(); ++r) {
      if (points.coords.row(i) == points.coords.row(reps[r])) {
        rep_of[i] = static_cast<int>(r);
        break;
      }
    }
    if (rep_of[i] < 0) {
      rep_of[i] = static_cast<int>(reps.size());
      reps.push_back(i);
    }
  }
  const auto k = static_cast<Eigen::Index>(reps.size());
  const double tau_sq = tau * tau;

  Eigen::MatrixXd gram(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    gram(a, a) = 0.5 * tau_sq;
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const double r_sq = points.squared_distance(reps[a], reps[b]);
      gram(a, b) = gram(b, a) = 0.5 * tau_sq * std::exp(-r_sq / tau_sq);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::KernelNotPSD, "kernel eigendecomposition failed");
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double floor = eig.eigenvalues().cwiseAbs().maxCoeff() * eps * static_cast<double>(k);
  if (eig.eigenvalues()(0) < -floor * 1e3) {
    throw Error(ErrorKind::KernelNotPSD, "kernel has a negative eigenvalue");
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index c = k - 1; c >= 0; --c) {
    if (eig.eigenvalues()(c) > floor) kept.push_back(c);
  }
  Eigen::MatrixXd features(k, static_cast<Eigen::Index>(kept.size()) + 1);
  for (std::size_t c = 0; c < kept.size(); ++c) {
    features.col(static_cast<Eigen::Index>(c)) =
        eig.eigenvectors().col(kept[c]) * std::sqrt(eig.eigenvalues()(kept[c]));
  }
  features.col(features.cols() - 1).setConstant(tau / std::sqrt(2.0));
  for (Eigen::Index a = 0; a < k; ++a) features.row(a) *= tau / features.row(a).norm();

  PointConfig out{Eigen::MatrixXd(n, features.cols())};
  for (int i = 0; i < n; ++i) out.coords.row(i) = features.row(rep_of[i]);

  // The factorization reproduces the kernel up to a backward error of about
  // k*eps*tau^2, which perturbs image distances of nearby points by
  // roughly k*eps*tau^2 / r. Allow that on top of a 1e-9 tau floor.
  const double backward = 16.0 * static_cast<double>(k) * eps * tau_sq;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a + 1; b < k; ++b) {
      const double r = points.distance(reps[a], reps[b]);
      const double g = (features.row(a) - features.row(b)).norm();
      const double cap = std::min(tau, r);
      const double slack = 1e-9 * tau + backward / std::max(cap, std::sqrt(backward));
      if (g > cap + slack || g < 0.5 * cap - slack) {
        std::ostringstream os;
        os << "truncation bound broken for input distance " << r << ": image distance " << g;
        throw Error(ErrorKind::KernelNotPSD, os.str());
      }
    }
  }
  return out;
}

Embedding truncate(const Embedding& e, double tau) {
  return {truncation_map(e.points(), tau).coords, e.lip_bound()};
}

}  // namespace mdesc
