#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sepnmf/matrix.hpp"
#include "sepnmf/objective.hpp"

namespace sepnmf {

struct FgmOptions {
  int max_iters = 500;
  double rel_step_tol = 1e-9;  // on ||X - X_prev||_F / max(1, ||X||_F)
  double alpha0 = 0.5;         // must be in (0,1)
  std::optional<DenseMatrix> warm_start;
};

/// Euclidean projection onto the unit simplex {x >= 0, sum(x) <= 1}.
///
/// If max(0,y) already sums to at most one that is the answer (multiplier
/// mu = 0); otherwise the sum-to-one multiplier is found after sorting.
inline std::vector<double> project_simplex(std::span<const double> y) {
  const std::size_t n = y.size();
  std::vector<double> x(n);
  double pos_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::max(0.0, y[i]);
    pos_sum += x[i];
  }
  if (pos_sum <= 1.0) return x;

  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cum = 0.0;
  double mu = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cum += sorted[k];
    double candidate = (cum - 1.0) / static_cast<double>(k + 1);
    if (k + 1 == n || sorted[k + 1] <= candidate) {
      mu = candidate;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, y[i] - mu);
  return x;
}

/// Largest squared singular value of A, by power iteration on A^T A.
inline double sigma_max_sq(const DenseMatrix& a, double tol = 1e-10) {
  if (!a.all_finite())
    throw std::invalid_argument("sigma_max_sq: non-finite input");
  const auto A = a.map();
  Eigen::MatrixXd gram = A.transpose() * A;
  const Eigen::Index r = gram.rows();
  if (gram.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  Eigen::VectorXd v = Eigen::VectorXd::Ones(r);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < 10000; ++it) {
    Eigen::VectorXd w = gram * v;
    double next = v.dot(w);
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(next - lambda) <= tol * std::max(1.0, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return lambda;
}

namespace detail {

inline void check_fgm_inputs(const DenseMatrix& a, const DenseMatrix& y) {
  if (a.rows() != y.rows())
    throw std::invalid_argument("fgm: row count mismatch between A and Y");
  if (!a.all_finite() || !y.all_finite())
    throw std::invalid_argument("fgm: non-finite input");
}

/// Accelerated projected gradient for min_x f(Ax - y), one subproblem per
/// column of Y, all sharing A. simplex = true projects onto the unit simplex,
/// otherwise onto the nonnegative orthant.
inline DenseMatrix fgm_ls(const DenseMatrix& a, const DenseMatrix& y,
                          const ObjectiveFunction& f, const FgmOptions& opts,
                          bool simplex) {
  check_fgm_inputs(a, y);
  if (opts.max_iters < 1 || opts.alpha0 <= 0.0 || opts.alpha0 >= 1.0)
    throw std::invalid_argument("fgm: invalid options");

  const std::size_t r = a.cols();
  const std::size_t n = y.cols();
  const auto A = a.map();
  const auto Y = y.map();

  // 1% safety on the power-iteration estimate; an under-estimated step bound
  // breaks the descent guarantee.
  const double lip = f.lipschitz * sigma_max_sq(a) * 1.01;
  if (lip == 0.0) throw std::invalid_argument("fgm: zero matrix A");
  const double inv_lip = 1.0 / lip;

  Eigen::MatrixXd x0 = Eigen::MatrixXd::Zero(r, n);
  if (opts.warm_start) {
    if (opts.warm_start->rows() != r || opts.warm_start->cols() != n)
      throw std::invalid_argument("fgm: warm start dimension mismatch");
    x0 = opts.warm_start->map();
  }

  Eigen::MatrixXd x = x0;
  Eigen::MatrixXd z = x;
  Eigen::MatrixXd grad(r, n);
  Eigen::VectorXd resid(a.rows());
  std::vector<double> buf(a.rows());
  double alpha = opts.alpha0;

  for (int it = 0; it < opts.max_iters; ++it) {
    Eigen::MatrixXd e = A * z - Y;
    Eigen::MatrixXd gf(a.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
      Eigen::VectorXd::Map(buf.data(), buf.size()) = e.col(j);
      auto g = f.gradient(std::span<const double>(buf));
      gf.col(j) = Eigen::VectorXd::Map(g.data(), g.size());
    }
    grad.noalias() = A.transpose() * gf;

    Eigen::MatrixXd x_prev = x;
    Eigen::MatrixXd step = z - inv_lip * grad;
    if (simplex) {
      std::vector<double> col(r);
      for (std::size_t j = 0; j < n; ++j) {
        Eigen::VectorXd::Map(col.data(), r) = step.col(j);
        auto p = project_simplex(col);
        x.col(j) = Eigen::VectorXd::Map(p.data(), r);
      }
    } else {
      x = step.cwiseMax(0.0);
    }

    // Gradient-based momentum restart: when the step opposes the gradient
    // direction at z, drop the accumulated momentum.
    if (it > 0 && grad.cwiseProduct(x - x_prev).sum() > 0.0) {
      alpha = opts.alpha0;
      z = x;
    } else {
      double alpha_next =
          0.5 * (-alpha * alpha + alpha * std::sqrt(alpha * alpha + 4.0));
      double beta = alpha * (1.0 - alpha) / (alpha * alpha + alpha_next);
      z = x + beta * (x - x_prev);
      alpha = alpha_next;
    }

    double dx = (x - x_prev).norm();
    if (dx <= opts.rel_step_tol * std::max(1.0, x.norm())) break;
  }

  // Monotonicity safeguard: never return a column worse than its start point.
  DenseMatrix out(r, n);
  std::vector<double> rbuf(a.rows());
  for (std::size_t j = 0; j < n; ++j) {
    Eigen::VectorXd::Map(rbuf.data(), rbuf.size()) = A * x.col(j) - Y.col(j);
    double fx = f.value(std::span<const double>(rbuf));
    Eigen::VectorXd::Map(rbuf.data(), rbuf.size()) = A * x0.col(j) - Y.col(j);
    double f0 = f.value(std::span<const double>(rbuf));
    auto dst = out.col(j);
    if (fx <= f0)
      Eigen::VectorXd::Map(dst.data(), r) = x.col(j);
    else
      Eigen::VectorXd::Map(dst.data(), r) = x0.col(j);
  }
  return out;
}

}  // namespace detail

/// Column j of the result approximately solves min_{x in simplex}
/// f(A x - Y(:,j)).
inline DenseMatrix fgm_simplex_ls(const DenseMatrix& a, const DenseMatrix& y,
                                  const ObjectiveFunction& f,
                                  const FgmOptions& opts = {}) {
  return detail::fgm_ls(a, y, f, opts, /*simplex=*/true);
}

/// Column j of the result approximately solves min_{x >= 0}
/// ||A x - Y(:,j)||_2^2.
inline DenseMatrix fgm_nonneg_ls(const DenseMatrix& a, const DenseMatrix& y,
                                 const FgmOptions& opts = {}) {
  return detail::fgm_ls(a, y, squared_l2_objective(), opts,
                        /*simplex=*/false);
}

}  // namespace sepnmf
