// Independent brute-force oracles used to pin expected values. These solve
// the same optimization problems as the library by exhaustive active-set
// enumeration and closed-form algebra, without touching the solver code paths
// under test.
#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sepnmf/matrix.hpp"
#include "sepnmf/rng.hpp"

namespace oracle {

// Projection onto {x >= 0, sum(x) <= 1}: enumerate the support and whether
// the sum constraint is active; closed form on each pattern.
inline std::vector<double> project_simplex(std::span<const double> y) {
  const std::size_t n = y.size();
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<double> best(n, 0.0);

  auto consider = [&](const std::vector<double>& x) {
    double sum = 0.0, obj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] < -1e-12) return;
      sum += x[i];
      obj += (x[i] - y[i]) * (x[i] - y[i]);
    }
    if (sum > 1.0 + 1e-12) return;
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  };

  consider(std::vector<double>(n, 0.0));
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) s.push_back(i);

    // sum constraint inactive: x_i = y_i on the support
    std::vector<double> x(n, 0.0);
    for (std::size_t i : s) x[i] = y[i];
    consider(x);

    // sum constraint active: uniform multiplier on the support
    double ysum = 0.0;
    for (std::size_t i : s) ysum += y[i];
    double mu = (ysum - 1.0) / static_cast<double>(s.size());
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i : s) x[i] = y[i] - mu;
    consider(x);
  }
  return best;
}

// min ||A x - y||_2 over the unit simplex by support enumeration.
inline std::vector<double> simplex_ls(const sepnmf::DenseMatrix& a,
                                      std::span<const double> y) {
  const std::size_t r = a.cols();
  const auto A = a.map();
  Eigen::VectorXd yv =
      Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());

  double best_obj = yv.squaredNorm();
  std::vector<double> best(r, 0.0);

  auto consider = [&](const std::vector<std::size_t>& s,
                      const Eigen::VectorXd& xs) {
    double sum = 0.0;
    for (Eigen::Index c = 0; c < xs.size(); ++c) {
      if (xs(c) < -1e-11) return;
      sum += xs(c);
    }
    if (sum > 1.0 + 1e-11) return;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(r);
    for (std::size_t c = 0; c < s.size(); ++c) full(s[c]) = xs(c);
    double obj = (A * full - yv).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      for (std::size_t i = 0; i < r; ++i) best[i] = full(i);
    }
  };

  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) s.push_back(i);
    Eigen::MatrixXd As(a.rows(), s.size());
    for (std::size_t c = 0; c < s.size(); ++c) As.col(c) = A.col(s[c]);

    consider(s, As.completeOrthogonalDecomposition().solve(yv).eval());

    const std::size_t k = s.size();
    Eigen::MatrixXd kkt(k + 1, k + 1);
    kkt.topLeftCorner(k, k) = As.transpose() * As;
    kkt.topRightCorner(k, 1).setOnes();
    kkt.bottomLeftCorner(1, k).setOnes();
    kkt(k, k) = 0.0;
    Eigen::VectorXd rhs(k + 1);
    rhs.head(k) = As.transpose() * yv;
    rhs(k) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (lu.isInvertible()) consider(s, lu.solve(rhs).head(k).eval());
  }
  return best;
}

inline double simplex_ls_objective(const sepnmf::DenseMatrix& a,
                                   std::span<const double> y) {
  auto x = simplex_ls(a, y);
  Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(
      x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd yv =
      Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  return (a.map() * xv - yv).squaredNorm();
}

// min ||A x - y||_2 with x >= 0 by support enumeration.
inline std::vector<double> nonneg_ls(const sepnmf::DenseMatrix& a,
                                     std::span<const double> y) {
  const std::size_t r = a.cols();
  const auto A = a.map();
  Eigen::VectorXd yv =
      Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  double best_obj = yv.squaredNorm();
  std::vector<double> best(r, 0.0);
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) s.push_back(i);
    Eigen::MatrixXd As(a.rows(), s.size());
    for (std::size_t c = 0; c < s.size(); ++c) As.col(c) = A.col(s[c]);
    Eigen::VectorXd xs = As.completeOrthogonalDecomposition().solve(yv);
    if ((xs.array() < -1e-11).any()) continue;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(r);
    for (std::size_t c = 0; c < s.size(); ++c) full(s[c]) = xs(c);
    double obj = (A * full - yv).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      for (std::size_t i = 0; i < r; ++i) best[i] = full(i);
    }
  }
  return best;
}

inline double nonneg_ls_objective(const sepnmf::DenseMatrix& a,
                                  std::span<const double> y) {
  auto x = nonneg_ls(a, y);
  Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(
      x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::VectorXd yv =
      Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  return (a.map() * xv - yv).squaredNorm();
}

// Largest eigenvalue of a symmetric 3x3 matrix via the characteristic cubic
// (trigonometric solution).
inline double largest_eig_sym3(const Eigen::Matrix3d& s) {
  double p1 = s(0, 1) * s(0, 1) + s(0, 2) * s(0, 2) + s(1, 2) * s(1, 2);
  double q = s.trace() / 3.0;
  double p2 = (s(0, 0) - q) * (s(0, 0) - q) + (s(1, 1) - q) * (s(1, 1) - q) +
              (s(2, 2) - q) * (s(2, 2) - q) + 2.0 * p1;
  if (p2 <= 0.0) return s(0, 0);  // scalar matrix
  double p = std::sqrt(p2 / 6.0);
  Eigen::Matrix3d b = (s - q * Eigen::Matrix3d::Identity()) / p;
  double detb = b.determinant() / 2.0;
  detb = std::clamp(detb, -1.0, 1.0);
  double phi = std::acos(detb) / 3.0;
  return q + 2.0 * p * std::cos(phi);
}

inline sepnmf::DenseMatrix random_matrix(std::size_t m, std::size_t n,
                                         sepnmf::SplitMix64& rng,
                                         double lo = 0.0, double hi = 1.0) {
  sepnmf::DenseMatrix out(m, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i)
      out(i, j) = lo + (hi - lo) * rng.uniform01();
  return out;
}

}  // namespace oracle
