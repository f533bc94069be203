#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace sepnmf {

/// Dense real matrix with column-major (column-contiguous) storage.
///
/// Every solver in this library walks over columns, so a column view is a
/// contiguous span aliasing the stored data.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("DenseMatrix: dimensions must be positive");
  }

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("DenseMatrix: dimensions must be positive");
    if (data_.size() != rows * cols)
      throw std::invalid_argument("DenseMatrix: data size mismatch");
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }
  double& operator()(std::size_t i, std::size_t j) {
    return data_[j * rows_ + i];
  }

  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<double> col(std::size_t j) {
    return {data_.data() + j * rows_, rows_};
  }

  const double* data() const { return data_.data(); }
  double* data() { return data_.data(); }

  Eigen::Map<const Eigen::MatrixXd> map() const {
    return {data_.data(), static_cast<Eigen::Index>(rows_),
            static_cast<Eigen::Index>(cols_)};
  }
  Eigen::Map<Eigen::MatrixXd> map() {
    return {data_.data(), static_cast<Eigen::Index>(rows_),
            static_cast<Eigen::Index>(cols_)};
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  /// Columns of this matrix restricted to the given index list, in order.
  DenseMatrix select_columns(const std::vector<std::size_t>& idx) const {
    if (idx.empty())
      throw std::invalid_argument("select_columns: empty index list");
    DenseMatrix out(rows_, idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (idx[k] >= cols_)
        throw std::out_of_range("select_columns: index out of range");
      auto src = col(idx[k]);
      std::copy(src.begin(), src.end(), out.col(k).begin());
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Which original columns survived l1 normalization and the scale that
/// recovers each original column from its normalized counterpart.
struct NormalizationReport {
  std::vector<std::size_t> kept_columns;  // strictly increasing
  std::vector<double> scale_factors;      // all > 0
};

/// Divide every column by its l1 norm; columns with l1 norm <= zero_tol are
/// dropped and recorded absent from kept_columns.
inline std::pair<DenseMatrix, NormalizationReport> l1_normalize_columns(
    const DenseMatrix& m, double zero_tol = 1e-12) {
  if (!m.all_finite())
    throw std::invalid_argument("l1_normalize_columns: non-finite input");
  if (zero_tol < 0)
    throw std::invalid_argument("l1_normalize_columns: negative zero_tol");

  NormalizationReport report;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double norm = 0.0;
    for (double v : m.col(j)) norm += std::abs(v);
    if (norm > zero_tol) {
      report.kept_columns.push_back(j);
      report.scale_factors.push_back(norm);
    }
  }
  if (report.kept_columns.empty())
    throw std::runtime_error("l1_normalize_columns: empty after normalization");

  DenseMatrix out(m.rows(), report.kept_columns.size());
  for (std::size_t k = 0; k < report.kept_columns.size(); ++k) {
    auto src = m.col(report.kept_columns[k]);
    auto dst = out.col(k);
    double inv = 1.0 / report.scale_factors[k];
    for (std::size_t i = 0; i < m.rows(); ++i) dst[i] = src[i] * inv;
  }
  return {std::move(out), std::move(report)};
}

/// Per-column Euclidean norms.
inline std::vector<double> col_norms_l2(const DenseMatrix& m) {
  if (!m.all_finite())
    throw std::invalid_argument("col_norms_l2: non-finite input");
  std::vector<double> norms(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (double v : m.col(j)) s += v * v;
    norms[j] = std::sqrt(s);
  }
  return norms;
}

}  // namespace sepnmf
