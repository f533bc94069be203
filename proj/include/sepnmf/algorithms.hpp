#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sepnmf/matrix.hpp"
#include "sepnmf/objective.hpp"
#include "sepnmf/projection.hpp"
#include "sepnmf/rng.hpp"

namespace sepnmf {

struct StopCriteria {
  std::size_t target_r = 1;
  // Relative residual threshold: extraction stops once the best remaining
  // column f-value drops below residual_tol times the best initial one.
  double residual_tol = 1e-12;
  // Ties within tie_rel_tol of the maximum go to the tie-break rule: first
  // the original column maximizing f, then smallest index (or a seeded draw).
  double tie_rel_tol = 1e-9;
  std::optional<std::uint64_t> tie_break_seed;
};

struct ExtractionResult {
  std::vector<std::size_t> indices;
  std::vector<double> per_step_max_f;
  std::optional<DenseMatrix> coefficients;  // r x n, SNPA/XRAY only
  std::size_t steps_completed = 0;
};

namespace detail {

inline void check_extract_inputs(const DenseMatrix& m,
                                 const StopCriteria& stop) {
  if (!m.all_finite())
    throw std::invalid_argument("extract: non-finite input");
  if (stop.target_r < 1 || stop.target_r > m.cols())
    throw std::invalid_argument("extract: target_r out of range");
}

/// Selection with the tie-break footnote: among residual maximizers (within
/// relative tolerance), pick the one whose original column maximizes f;
/// remaining ties go to the smallest index, or a seeded random draw.
inline std::size_t select_column(const std::vector<double>& vals,
                                 const std::vector<double>& original_f,
                                 const std::vector<bool>& excluded,
                                 const StopCriteria& stop, SplitMix64* rng) {
  double vmax = -1.0;
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (!excluded[j] && vals[j] > vmax) vmax = vals[j];
  if (vmax < 0.0) throw std::logic_error("select_column: no candidate");

  const double tie_tol = stop.tie_rel_tol * std::max(vmax, 0.0);
  double omax = -1.0;
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (!excluded[j] && vals[j] >= vmax - tie_tol && original_f[j] > omax)
      omax = original_f[j];

  const double orig_tol = stop.tie_rel_tol * std::max(1.0, omax);
  std::vector<std::size_t> tied;
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (!excluded[j] && vals[j] >= vmax - tie_tol &&
        original_f[j] >= omax - orig_tol)
      tied.push_back(j);

  if (tied.size() == 1 || !rng) return tied.front();
  return tied[static_cast<std::size_t>(rng->next() % tied.size())];
}

inline std::vector<double> column_f_values(const DenseMatrix& m,
                                           const ObjectiveFunction& f) {
  std::vector<double> vals(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) vals[j] = f.value(m.col(j));
  return vals;
}

}  // namespace detail

/// Successive projection: select the residual column maximizing f, then
/// deflate the residual against the selected direction orthogonally.
inline ExtractionResult spa(const DenseMatrix& m_tilde,
                            const StopCriteria& stop,
                            const ObjectiveFunction& f = squared_l2_objective()) {
  detail::check_extract_inputs(m_tilde, stop);

  Eigen::MatrixXd r = m_tilde.map();
  const std::vector<double> original_f =
      detail::column_f_values(m_tilde, f);
  std::optional<SplitMix64> rng;
  if (stop.tie_break_seed) rng.emplace(*stop.tie_break_seed);

  ExtractionResult result;
  std::vector<bool> excluded(m_tilde.cols(), false);
  std::vector<double> buf(m_tilde.rows());
  double stop_threshold = -1.0;

  for (std::size_t k = 0; k < stop.target_r; ++k) {
    std::vector<double> vals(m_tilde.cols());
    for (std::size_t j = 0; j < m_tilde.cols(); ++j) {
      Eigen::VectorXd::Map(buf.data(), buf.size()) = r.col(j);
      vals[j] = f.value(std::span<const double>(buf));
    }
    double vmax = *std::max_element(vals.begin(), vals.end());
    if (stop_threshold < 0.0) stop_threshold = stop.residual_tol * vmax;
    if (vmax <= stop_threshold) break;

    std::size_t p = detail::select_column(vals, original_f, excluded, stop,
                                          rng ? &*rng : nullptr);
    result.indices.push_back(p);
    result.per_step_max_f.push_back(vals[p]);
    excluded[p] = true;

    Eigen::VectorXd u = r.col(p);
    double nn = u.squaredNorm();
    if (nn > 0.0) r -= u * (u.transpose() * r) / nn;
    ++result.steps_completed;
  }
  return result;
}

/// Successive nonnegative projection: select the residual column maximizing
/// f, then re-project every column of M onto the convex hull of the extracted
/// columns and the origin.
inline ExtractionResult snpa(const DenseMatrix& m_tilde,
                             const StopCriteria& stop,
                             const ObjectiveFunction& f = squared_l2_objective(),
                             const FgmOptions& fgm_opts = {}) {
  detail::check_extract_inputs(m_tilde, stop);

  const std::vector<double> original_f =
      detail::column_f_values(m_tilde, f);
  std::optional<SplitMix64> rng;
  if (stop.tie_break_seed) rng.emplace(*stop.tie_break_seed);

  ExtractionResult result;
  std::vector<bool> excluded(m_tilde.cols(), false);
  Eigen::MatrixXd r = m_tilde.map();
  std::vector<double> buf(m_tilde.rows());
  double stop_threshold = -1.0;
  std::optional<DenseMatrix> h_star;

  for (std::size_t k = 0; k < stop.target_r; ++k) {
    std::vector<double> vals(m_tilde.cols());
    for (std::size_t j = 0; j < m_tilde.cols(); ++j) {
      Eigen::VectorXd::Map(buf.data(), buf.size()) = r.col(j);
      vals[j] = f.value(std::span<const double>(buf));
    }
    double vmax = *std::max_element(vals.begin(), vals.end());
    if (stop_threshold < 0.0) stop_threshold = stop.residual_tol * vmax;
    if (vmax <= stop_threshold) break;

    std::size_t p = detail::select_column(vals, original_f, excluded, stop,
                                          rng ? &*rng : nullptr);
    result.indices.push_back(p);
    result.per_step_max_f.push_back(vals[p]);
    excluded[p] = true;

    DenseMatrix basis = m_tilde.select_columns(result.indices);
    FgmOptions opts = fgm_opts;
    if (h_star) {
      // Pad the previous coefficients with a zero row for the new index.
      DenseMatrix warm(h_star->rows() + 1, h_star->cols());
      warm.map().topRows(h_star->rows()) = h_star->map();
      opts.warm_start = std::move(warm);
    }
    h_star = fgm_simplex_ls(basis, m_tilde, f, opts);
    r = m_tilde.map() - basis.map() * h_star->map();
    ++result.steps_completed;
  }
  result.coefficients = std::move(h_star);
  return result;
}

/// XRAY (max variant) comparator: cone projection via nonnegative least
/// squares, selecting the column with largest residual-to-input norm ratio.
/// The input must be entrywise nonnegative.
inline ExtractionResult xray_max(const DenseMatrix& m_tilde,
                                 const StopCriteria& stop,
                                 const FgmOptions& fgm_opts = {}) {
  detail::check_extract_inputs(m_tilde, stop);
  for (std::size_t j = 0; j < m_tilde.cols(); ++j)
    for (double v : m_tilde.col(j))
      if (v < -1e-12)
        throw std::invalid_argument("xray_max: negative entries in input");

  const ObjectiveFunction f = squared_l2_objective();
  const std::vector<double> original_f =
      detail::column_f_values(m_tilde, f);
  std::optional<SplitMix64> rng;
  if (stop.tie_break_seed) rng.emplace(*stop.tie_break_seed);

  ExtractionResult result;
  std::vector<bool> excluded(m_tilde.cols(), false);
  for (std::size_t j = 0; j < m_tilde.cols(); ++j)
    if (original_f[j] == 0.0) excluded[j] = true;  // zero columns never selected

  Eigen::MatrixXd r = m_tilde.map();
  std::vector<double> buf(m_tilde.rows());
  double stop_threshold = -1.0;
  std::optional<DenseMatrix> h_star;

  for (std::size_t k = 0; k < stop.target_r; ++k) {
    std::vector<double> resid_f(m_tilde.cols());
    std::vector<double> crit(m_tilde.cols(), 0.0);
    for (std::size_t j = 0; j < m_tilde.cols(); ++j) {
      Eigen::VectorXd::Map(buf.data(), buf.size()) = r.col(j);
      resid_f[j] = f.value(std::span<const double>(buf));
      if (original_f[j] > 0.0) crit[j] = resid_f[j] / original_f[j];
    }
    double vmax = *std::max_element(resid_f.begin(), resid_f.end());
    if (stop_threshold < 0.0) stop_threshold = stop.residual_tol * vmax;
    if (vmax <= stop_threshold) break;

    std::size_t p = detail::select_column(crit, original_f, excluded, stop,
                                          rng ? &*rng : nullptr);
    result.indices.push_back(p);
    result.per_step_max_f.push_back(resid_f[p]);
    excluded[p] = true;

    DenseMatrix basis = m_tilde.select_columns(result.indices);
    FgmOptions opts = fgm_opts;
    if (h_star) {
      DenseMatrix warm(h_star->rows() + 1, h_star->cols());
      warm.map().topRows(h_star->rows()) = h_star->map();
      opts.warm_start = std::move(warm);
    }
    h_star = fgm_nonneg_ls(basis, m_tilde, opts);
    r = m_tilde.map() - basis.map() * h_star->map();
    ++result.steps_completed;
  }
  result.coefficients = std::move(h_star);
  return result;
}

}  // namespace sepnmf
