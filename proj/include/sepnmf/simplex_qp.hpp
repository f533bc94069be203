#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sepnmf/matrix.hpp"

namespace sepnmf {

/// Exact solver for min ||A x - y||_2 over the unit simplex, by enumerating
/// support patterns (and the sum-to-one constraint on/off) and solving the
/// reduced least-squares problem on each. Exponential in the column count of
/// A; intended for polishing and oracle-grade accuracy at small r.
inline std::vector<double> simplex_ls_exact(const DenseMatrix& a,
                                            std::span<const double> y,
                                            double feas_tol = 1e-10) {
  const std::size_t r = a.cols();
  const std::size_t m = a.rows();
  if (y.size() != m)
    throw std::invalid_argument("simplex_ls_exact: dimension mismatch");
  if (r > 20)
    throw std::invalid_argument("simplex_ls_exact: too many columns");

  const auto A = a.map();
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), m);

  double best_obj = yv.squaredNorm();  // x = 0 is always feasible
  std::vector<double> best(r, 0.0);

  std::vector<int> support;
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    support.clear();
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) support.push_back(static_cast<int>(i));
    const std::size_t k = support.size();

    Eigen::MatrixXd As(m, k);
    for (std::size_t c = 0; c < k; ++c) As.col(c) = A.col(support[c]);

    for (int sum_active = 0; sum_active < 2; ++sum_active) {
      Eigen::VectorXd xs;
      if (!sum_active) {
        xs = As.completeOrthogonalDecomposition().solve(yv);
      } else {
        // KKT system for min ||As xs - y|| s.t. e^T xs = 1.
        Eigen::MatrixXd kkt(k + 1, k + 1);
        kkt.topLeftCorner(k, k) = As.transpose() * As;
        kkt.topRightCorner(k, 1).setOnes();
        kkt.bottomLeftCorner(1, k).setOnes();
        kkt(k, k) = 0.0;
        Eigen::VectorXd rhs(k + 1);
        rhs.head(k) = As.transpose() * yv;
        rhs(k) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
        if (!lu.isInvertible()) continue;
        xs = lu.solve(rhs).head(k);
      }
      if ((xs.array() < -feas_tol).any()) continue;
      double s = xs.sum();
      if (s > 1.0 + feas_tol) continue;
      double obj = (As * xs - yv).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        std::fill(best.begin(), best.end(), 0.0);
        for (std::size_t c = 0; c < k; ++c)
          best[support[c]] = std::max(0.0, xs(c));
      }
    }
  }
  return best;
}

/// Exact nonnegative least squares min ||A x - y||_2, x >= 0, by the same
/// support enumeration (without the sum constraint).
inline std::vector<double> nonneg_ls_exact(const DenseMatrix& a,
                                           std::span<const double> y,
                                           double feas_tol = 1e-10) {
  const std::size_t r = a.cols();
  const std::size_t m = a.rows();
  if (y.size() != m)
    throw std::invalid_argument("nonneg_ls_exact: dimension mismatch");
  if (r > 20)
    throw std::invalid_argument("nonneg_ls_exact: too many columns");

  const auto A = a.map();
  Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), m);

  double best_obj = yv.squaredNorm();
  std::vector<double> best(r, 0.0);
  std::vector<int> support;
  for (std::uint32_t mask = 1; mask < (1u << r); ++mask) {
    support.clear();
    for (std::size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) support.push_back(static_cast<int>(i));
    Eigen::MatrixXd As(m, support.size());
    for (std::size_t c = 0; c < support.size(); ++c)
      As.col(c) = A.col(support[c]);
    Eigen::VectorXd xs = As.completeOrthogonalDecomposition().solve(yv);
    if ((xs.array() < -feas_tol).any()) continue;
    double obj = (As * xs - yv).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      std::fill(best.begin(), best.end(), 0.0);
      for (std::size_t c = 0; c < support.size(); ++c)
        best[support[c]] = std::max(0.0, xs(c));
    }
  }
  return best;
}

}  // namespace sepnmf
