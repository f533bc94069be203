#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sepnmf/matrix.hpp"
#include "sepnmf/objective.hpp"
#include "sepnmf/projection.hpp"
#include "sepnmf/simplex_qp.hpp"

namespace sepnmf {

struct DiagnosticsReport {
  double alpha = 0.0;
  double nu = 0.0;
  double gamma = 0.0;
  double omega = 0.0;
  double k_norm = 0.0;
  double sigma = 0.0;
  double beta = 0.0;
  double beta_prime = 0.0;
  double kappa = 1.0;       // infinity when sigma == 0
  double kappa_beta = 1.0;  // infinity when beta == 0
  bool exact_beta = true;   // whether beta used exhaustive subset enumeration
};

namespace detail {

/// Residual of projecting y onto the convex hull of the columns of basis and
/// the origin, under the semi-metric induced by f. An empty basis leaves y
/// unchanged. The fast gradient solve is polished by the exact active-set
/// enumeration when the basis is small; whichever candidate has the lower
/// f-value wins.
inline Eigen::VectorXd hull_residual(const DenseMatrix* basis,
                                     std::span<const double> y,
                                     const ObjectiveFunction& f,
                                     const FgmOptions& opts,
                                     std::size_t max_exact_r) {
  Eigen::VectorXd yv =
      Eigen::Map<const Eigen::VectorXd>(y.data(), y.size());
  if (!basis) return yv;

  DenseMatrix ym(y.size(), 1,
                 std::vector<double>(y.begin(), y.end()));
  FgmOptions tight = opts;
  tight.warm_start.reset();
  DenseMatrix h = fgm_simplex_ls(*basis, ym, f, tight);
  Eigen::VectorXd res_fgm = yv - basis->map() * h.map();

  if (basis->cols() > max_exact_r) return res_fgm;

  auto x = simplex_ls_exact(*basis, y);
  Eigen::VectorXd res_exact =
      yv - basis->map() * Eigen::Map<const Eigen::VectorXd>(
                              x.data(), static_cast<Eigen::Index>(x.size()));

  std::vector<double> b1(res_fgm.data(), res_fgm.data() + res_fgm.size());
  std::vector<double> b2(res_exact.data(), res_exact.data() + res_exact.size());
  return f.value(b2) <= f.value(b1) ? res_exact : res_fgm;
}

inline std::vector<std::size_t> complement(std::size_t r,
                                           std::initializer_list<std::size_t> drop) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < r; ++i) {
    bool skip = false;
    for (std::size_t d : drop) skip |= (i == d);
    if (!skip) out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Minimum Euclidean distance between a column of W and the convex hull of
/// the other columns and the origin.
inline double alpha(const DenseMatrix& w, const FgmOptions& opts = {},
                    std::size_t max_exact_r = 12) {
  const ObjectiveFunction f = squared_l2_objective();
  const std::size_t r = w.cols();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < r; ++j) {
    auto others = detail::complement(r, {j});
    if (others.empty()) {
      double n2 = 0.0;
      for (double v : w.col(j)) n2 += v * v;
      best = std::min(best, std::sqrt(n2));
      continue;
    }
    DenseMatrix basis = w.select_columns(others);
    Eigen::VectorXd res =
        detail::hull_residual(&basis, w.col(j), f, opts, max_exact_r);
    best = std::min(best, res.norm());
  }
  return best;
}

inline double nu(const DenseMatrix& w) {
  auto norms = col_norms_l2(w);
  return *std::min_element(norms.begin(), norms.end());
}

inline double k_norm(const DenseMatrix& w) {
  auto norms = col_norms_l2(w);
  return *std::max_element(norms.begin(), norms.end());
}

inline double gamma(const DenseMatrix& w) {
  double best = std::numeric_limits<double>::infinity();
  const auto W = w.map();
  for (Eigen::Index i = 0; i < W.cols(); ++i)
    for (Eigen::Index j = i + 1; j < W.cols(); ++j)
      best = std::min(best, (W.col(i) - W.col(j)).norm());
  return best;
}

inline double omega(const DenseMatrix& w) {
  return std::min(nu(w), gamma(w) / std::sqrt(2.0));
}

/// Smallest singular value when m >= r, zero otherwise.
inline double sigma(const DenseMatrix& w) {
  if (!w.all_finite()) throw std::invalid_argument("sigma: non-finite input");
  if (w.rows() < w.cols()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.map());
  return svd.singularValues().minCoeff();
}

/// beta(W) = min(nu_beta, gamma_beta / sqrt(2)), the residual-based
/// conditioning parameter. gamma_beta minimizes over all subsets of the
/// complement of {i, j} when r <= max_exact_r; beyond that it is restricted
/// to prefix subsets and the result is flagged inexact.
inline std::pair<double, bool> beta(const DenseMatrix& w,
                                    const ObjectiveFunction& f =
                                        squared_l2_objective(),
                                    const FgmOptions& opts = {},
                                    std::size_t max_exact_r = 12) {
  const std::size_t r = w.cols();

  double nu_beta = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < r; ++j) {
    auto others = detail::complement(r, {j});
    if (others.empty()) {
      Eigen::VectorXd res =
          detail::hull_residual(nullptr, w.col(j), f, opts, max_exact_r);
      nu_beta = std::min(nu_beta, res.norm());
      continue;
    }
    DenseMatrix basis = w.select_columns(others);
    Eigen::VectorXd res =
        detail::hull_residual(&basis, w.col(j), f, opts, max_exact_r);
    nu_beta = std::min(nu_beta, res.norm());
  }

  const bool exact = r <= max_exact_r;
  double gamma_beta = std::numeric_limits<double>::infinity();

  // Residual cache keyed by (subset mask, target column).
  std::map<std::pair<std::uint32_t, std::size_t>, Eigen::VectorXd> cache;
  auto residual_for = [&](std::uint32_t mask,
                          std::size_t target) -> const Eigen::VectorXd& {
    auto key = std::make_pair(mask, target);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<std::size_t> idx;
    for (std::size_t c = 0; c < r; ++c)
      if (mask & (1u << c)) idx.push_back(c);
    Eigen::VectorXd res;
    if (idx.empty()) {
      res = detail::hull_residual(nullptr, w.col(target), f, opts, max_exact_r);
    } else {
      DenseMatrix basis = w.select_columns(idx);
      res = detail::hull_residual(&basis, w.col(target), f, opts, max_exact_r);
    }
    return cache.emplace(key, std::move(res)).first->second;
  };

  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      if (exact) {
        // all subsets of {0..r-1} \ {i, j}
        std::vector<std::size_t> comp = detail::complement(r, {i, j});
        const std::uint32_t nsub = 1u << comp.size();
        for (std::uint32_t s = 0; s < nsub; ++s) {
          std::uint32_t mask = 0;
          for (std::size_t c = 0; c < comp.size(); ++c)
            if (s & (1u << c)) mask |= 1u << comp[c];
          double d =
              (residual_for(mask, i) - residual_for(mask, j)).norm();
          gamma_beta = std::min(gamma_beta, d);
        }
      } else {
        // prefix subsets only
        for (std::size_t t = 0; t <= r; ++t) {
          std::uint32_t mask = 0;
          for (std::size_t c = 0; c < t; ++c)
            if (c != i && c != j) mask |= 1u << c;
          double d =
              (residual_for(mask, i) - residual_for(mask, j)).norm();
          gamma_beta = std::min(gamma_beta, d);
        }
      }
    }
  }

  return {std::min(nu_beta, gamma_beta / std::sqrt(2.0)), exact};
}

/// beta'(W), the prefix-ordered relaxation of beta. Columns must be ordered
/// in extraction order (caller's responsibility).
inline double beta_prime(const DenseMatrix& w_ordered,
                         const ObjectiveFunction& f = squared_l2_objective(),
                         const FgmOptions& opts = {},
                         std::size_t max_exact_r = 12) {
  const std::size_t r = w_ordered.cols();
  double best = std::numeric_limits<double>::infinity();

  for (std::size_t i = 1; i <= r; ++i) {
    std::vector<std::size_t> prefix(i);
    for (std::size_t c = 0; c < i; ++c) prefix[c] = c;
    DenseMatrix basis = w_ordered.select_columns(prefix);

    std::vector<Eigen::VectorXd> residuals;
    for (std::size_t k = i; k < r; ++k)
      residuals.push_back(detail::hull_residual(&basis, w_ordered.col(k), f,
                                                opts, max_exact_r));
    for (std::size_t k = 0; k < residuals.size(); ++k) {
      best = std::min(best, residuals[k].norm());
      for (std::size_t l = k + 1; l < residuals.size(); ++l)
        best = std::min(best,
                        (residuals[k] - residuals[l]).norm() / std::sqrt(2.0));
    }
  }
  return best;
}

struct DiagnosticsOptions {
  FgmOptions solver;
  std::size_t max_exact_r = 12;
};

inline DiagnosticsReport full_report(const DenseMatrix& w,
                                     const ObjectiveFunction& f =
                                         squared_l2_objective(),
                                     const DiagnosticsOptions& opts = {}) {
  DiagnosticsReport rep;
  rep.alpha = alpha(w, opts.solver, opts.max_exact_r);
  rep.nu = nu(w);
  rep.gamma = w.cols() >= 2 ? gamma(w)
                            : std::numeric_limits<double>::infinity();
  rep.omega = std::min(rep.nu, rep.gamma / std::sqrt(2.0));
  rep.k_norm = k_norm(w);
  rep.sigma = sigma(w);
  auto [b, exact] = beta(w, f, opts.solver, opts.max_exact_r);
  rep.beta = b;
  rep.exact_beta = exact;
  rep.beta_prime = beta_prime(w, f, opts.solver, opts.max_exact_r);

  const double inf = std::numeric_limits<double>::infinity();
  if (rep.sigma > 0.0) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w.map());
    rep.kappa = svd.singularValues().maxCoeff() / rep.sigma;
  } else {
    rep.kappa = inf;
  }
  rep.kappa_beta = rep.beta > 0.0 ? rep.k_norm / rep.beta : inf;
  return rep;
}

}  // namespace sepnmf
