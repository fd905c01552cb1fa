#include "mdesc/metric.hpp"

#include "mdesc/error.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <sstream>

namespace mdesc {

MetricSpace::MetricSpace(Eigen::MatrixXd d, std::vector<std::string> labels)
    : d_(std::move(d)), labels_(std::move(labels)) {
  const int n = size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = d_(i, j);
      diameter_ = std::max(diameter_, v);
      if (v > 0.0 && (min_positive_ == 0.0 || v < min_positive_)) min_positive_ = v;
    }
  }
}

double MetricSpace::distance_to_set(int x, std::span<const int> set) const {
  double best = std::numeric_limits<double>::infinity();
  for (int s : set) best = std::min(best, d_(x, s));
  return best;
}

MetricSpace MetricSpace::restricted(std::span<const int> subset) const {
  const auto k = static_cast<Eigen::Index>(subset.size());
  Eigen::MatrixXd d(k, k);
  std::vector<std::string> labels;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) d(a, b) = d_(subset[a], subset[b]);
    if (!labels_.empty()) labels.push_back(labels_[subset[a]]);
  }
  return MetricSpace(std::move(d), std::move(labels));
}

MetricSpace MetricSpace::scaled(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw Error(ErrorKind::InvalidArgument, "scale factor must be positive");
  }
  return MetricSpace(d_ * factor, labels_);
}

MetricSpace validate_metric(Eigen::MatrixXd d, std::vector<std::string> labels,
                            const ValidationOptions& options) {
  if (d.rows() != d.cols()) {
    throw Error(ErrorKind::NotSquare, "distance matrix is " + std::to_string(d.rows()) + "x" +
                                          std::to_string(d.cols()));
  }
  const auto n = static_cast<int>(d.rows());
  if (!labels.empty() && static_cast<int>(labels.size()) != n) {
    throw Error(ErrorKind::InvalidArgument, "label count does not match point count");
  }
  const double tol = options.tol;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!std::isfinite(d(i, j)) || d(i, j) < 0.0) {
        std::ostringstream os;
        os << "d(" << i << "," << j << ") = " << d(i, j);
        throw Error(ErrorKind::NegativeEntry, os.str());
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    if (d(i, i) != 0.0) {
      throw Error(ErrorKind::NonzeroDiagonal, "d(" + std::to_string(i) + "," + std::to_string(i) +
                                                  ") != 0");
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(d(i, j) - d(j, i)) > tol) {
        throw Error(ErrorKind::AsymmetricMatrix,
                    "d(" + std::to_string(i) + "," + std::to_string(j) + ") != d(" +
                        std::to_string(j) + "," + std::to_string(i) + ")");
      }
      if (tol > 0.0) d(j, i) = d(i, j);
      if (!options.allow_coincident && d(i, j) == 0.0) {
        throw Error(ErrorKind::CoincidentPoints,
                    "d(" + std::to_string(i) + "," + std::to_string(j) + ") = 0");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        if (d(i, j) > d(i, k) + d(k, j) + tol) {
          std::ostringstream os;
          os << "(" << i << "," << j << "," << k << "): d(" << i << "," << j << ") = " << d(i, j)
             << " > d(" << i << "," << k << ") + d(" << k << "," << j << ") = "
             << d(i, k) + d(k, j);
          throw Error(ErrorKind::TriangleViolation, os.str());
        }
      }
    }
  }
  return MetricSpace(std::move(d), std::move(labels));
}

double default_negative_type_tol(const MetricSpace& m) {
  return 1e-9 * std::max(m.diameter(), std::numeric_limits<double>::min());
}

namespace {

Eigen::MatrixXd centered_gram(const Eigen::MatrixXd& d) {
  const auto n = d.rows();
  const Eigen::VectorXd row_mean = d.rowwise().mean();
  const double total_mean = d.mean();
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = -0.5 * (d(i, j) - row_mean(i) - row_mean(j) + total_mean);
    }
  }
  return 0.5 * (g + g.transpose());
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorKind::EigDecompositionFailure, "symmetric eigensolver did not converge");
  }
  return eig;
}

}  // namespace

NegativeTypeVerdict is_negative_type(const MetricSpace& m, double tol) {
  if (tol < 0.0) tol = default_negative_type_tol(m);
  NegativeTypeVerdict verdict;
  if (m.size() < 2) return verdict;
  const auto eig = decompose(centered_gram(m.matrix()));
  verdict.min_eigenvalue = eig.eigenvalues()(0);
  if (verdict.min_eigenvalue >= -tol) return verdict;

  verdict.is_negative_type = false;
  Eigen::VectorXd c = eig.eigenvectors().col(0);
  c.array() -= c.mean();
  verdict.witness = c;
  return verdict;
}

PointConfig sqrt_embedding(const MetricSpace& m, double tol) {
  if (tol < 0.0) tol = default_negative_type_tol(m);
  const int n = m.size();
  if (n == 0) return {};
  if (n == 1) return {Eigen::MatrixXd::Zero(1, 1)};
  const auto eig = decompose(centered_gram(m.matrix()));
  if (eig.eigenvalues()(0) < -tol) {
    throw Error(ErrorKind::NotNegativeType,
                "centered matrix has eigenvalue " + std::to_string(eig.eigenvalues()(0)));
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    if (eig.eigenvalues()(k) > tol) kept.push_back(k);
  }
  PointConfig out{Eigen::MatrixXd::Zero(n, std::max<Eigen::Index>(1, kept.size()))};
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out.coords.col(static_cast<Eigen::Index>(c)) =
        eig.eigenvectors().col(kept[c]) * std::sqrt(eig.eigenvalues()(kept[c]));
  }
  return out;
}

PointSet all_points(int n) {
  PointSet s(n);
  for (int i = 0; i < n; ++i) s[i] = i;
  return s;
}

PointSet ball(const MetricSpace& m, int x, double r) {
  PointSet out;
  for (int y = 0; y < m.size(); ++y) {
    if (m(x, y) <= r) out.push_back(y);
  }
  return out;
}

int ball_size(const MetricSpace& m, int x, double r) {
  int count = 0;
  for (int y = 0; y < m.size(); ++y) count += m(x, y) <= r ? 1 : 0;
  return count;
}

int floor_log2(double x) { return std::ilogb(x); }

int ceil_log2(double x) {
  int e = 0;
  const double mantissa = std::frexp(x, &e);  // x = mantissa * 2^e, mantissa in [0.5, 1)
  return mantissa == 0.5 ? e - 1 : e;
}

int ceil_log2(int n) {
  int k = 0;
  while ((std::int64_t{1} << k) < n) ++k;
  return k;
}

double growth_sum(const MetricSpace& m, int x, int a) {
  if (a < 1) throw Error(ErrorKind::InvalidArgument, "growth_sum needs a >= 1");
  if (m.size() < 2 || m.min_positive_distance() == 0.0) return 0.0;
  // largest k with 2^k < min positive distance, smallest k with 2^k > diameter
  const int k_lo = ceil_log2(m.min_positive_distance()) - 1;
  const int k_hi = floor_log2(m.diameter()) + 1;
  double sum = 0.0;
  for (int k = k_lo; k <= k_hi; ++k) {
    const int outer = ball_size(m, x, std::ldexp(1.0, k + a));
    const int inner = ball_size(m, x, std::ldexp(1.0, k));
    sum += std::log2(static_cast<double>(outer) / static_cast<double>(inner));
  }
  return sum;
}

ScaleRange dyadic_scales(const MetricSpace& m) {
  if (m.min_positive_distance() == 0.0) return {};
  const int lo = floor_log2(m.min_positive_distance());
  const int hi = std::max(lo, ceil_log2(m.diameter()) - 1);
  return {lo, hi};
}

}  // namespace mdesc
