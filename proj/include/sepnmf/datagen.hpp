#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "sepnmf/matrix.hpp"
#include "sepnmf/projection.hpp"
#include "sepnmf/rng.hpp"

namespace sepnmf {

enum class EnsembleKind {
  RankdefDirichlet,
  RankdefMiddle,
  IllcondDirichlet,
  IllcondMiddle,
};

inline std::string to_string(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::RankdefDirichlet: return "rankdef-dirichlet";
    case EnsembleKind::RankdefMiddle: return "rankdef-middle";
    case EnsembleKind::IllcondDirichlet: return "illcond-dirichlet";
    case EnsembleKind::IllcondMiddle: return "illcond-middle";
  }
  throw std::logic_error("unknown ensemble kind");
}

inline EnsembleKind ensemble_kind_from_string(const std::string& s) {
  if (s == "rankdef-dirichlet") return EnsembleKind::RankdefDirichlet;
  if (s == "rankdef-middle") return EnsembleKind::RankdefMiddle;
  if (s == "illcond-dirichlet") return EnsembleKind::IllcondDirichlet;
  if (s == "illcond-middle") return EnsembleKind::IllcondMiddle;
  throw std::invalid_argument("unknown ensemble kind: " + s);
}

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::RankdefDirichlet;
  std::size_t m = 10;  // 10 for rank-deficient, 20 for ill-conditioned
  std::size_t r = 20;
  double delta = 0.0;
  std::uint64_t seed = 0;

  static EnsembleSpec defaults(EnsembleKind kind) {
    EnsembleSpec s;
    s.kind = kind;
    s.m = (kind == EnsembleKind::RankdefDirichlet ||
           kind == EnsembleKind::RankdefMiddle)
              ? 10
              : 20;
    s.r = 20;
    return s;
  }
};

enum class NoiseKind { Gaussian, MiddleOutward };

struct NearSeparableInstance {
  DenseMatrix m_tilde;
  DenseMatrix w;
  DenseMatrix h;
  DenseMatrix noise;
  double noise_delta = 0.0;
  // For each ground-truth column j, the columns of m_tilde equal to w_j in
  // the noiseless matrix.
  std::map<std::size_t, std::vector<std::size_t>> duplicate_map;
  std::uint64_t seed = 0;
};

/// H = [I_r, I_r, H'] with H' columns sampled from a Dirichlet distribution
/// whose parameters are drawn once (uniform in [0,1]) and shared across all
/// columns.
inline DenseMatrix gen_dirichlet_H(std::size_t r, std::size_t n_prime,
                                   SplitMix64& rng) {
  if (r < 1 || n_prime < 1)
    throw std::invalid_argument("gen_dirichlet_H: bad dimensions");
  DenseMatrix h(r, 2 * r + n_prime);
  for (std::size_t i = 0; i < r; ++i) {
    h(i, i) = 1.0;
    h(i, i + r) = 1.0;
  }
  std::vector<double> params(r);
  for (std::size_t i = 0; i < r; ++i) params[i] = rng.uniform01();

  for (std::size_t j = 0; j < n_prime; ++j) {
    auto col = h.col(2 * r + j);
    double sum = 0.0;
    do {
      sum = 0.0;
      for (std::size_t i = 0; i < r; ++i) {
        col[i] = params[i] > 0.0 ? rng.gamma(params[i]) : 0.0;
        sum += col[i];
      }
    } while (sum <= 0.0);
    for (std::size_t i = 0; i < r; ++i) col[i] /= sum;
  }
  return h;
}

/// H = [I_r, H'] where H' holds all pairwise midpoints in lexicographic pair
/// order. Deterministic.
inline DenseMatrix gen_middlepoints_H(std::size_t r) {
  if (r < 2) throw std::invalid_argument("gen_middlepoints_H: r must be >= 2");
  const std::size_t n = r + r * (r - 1) / 2;
  DenseMatrix h(r, n);
  for (std::size_t i = 0; i < r; ++i) h(i, i) = 1.0;
  std::size_t c = r;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = i + 1; j < r; ++j) {
      h(i, c) = 0.5;
      h(j, c) = 0.5;
      ++c;
    }
  return h;
}

/// Uniform [0,1] entries, regenerated wholesale until every column keeps a 1%
/// conic margin from the cone of the other columns.
inline DenseMatrix gen_rankdef_W(std::size_t m, std::size_t r, SplitMix64& rng,
                                 int max_retries = 1000) {
  FgmOptions margin_opts;
  margin_opts.max_iters = 2000;
  margin_opts.rel_step_tol = 1e-12;

  for (int attempt = 0; attempt < max_retries; ++attempt) {
    DenseMatrix w(m, r);
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < m; ++i) w(i, j) = rng.uniform01();

    bool ok = true;
    auto norms = col_norms_l2(w);
    for (std::size_t j = 0; j < r && ok; ++j) {
      std::vector<std::size_t> others;
      for (std::size_t c = 0; c < r; ++c)
        if (c != j) others.push_back(c);
      DenseMatrix basis = w.select_columns(others);
      DenseMatrix target(m, 1,
                         std::vector<double>(w.col(j).begin(), w.col(j).end()));
      DenseMatrix x = fgm_nonneg_ls(basis, target, margin_opts);
      Eigen::VectorXd res =
          target.map().col(0) - basis.map() * x.map().col(0);
      if (res.norm() < 0.01 * norms[j]) ok = false;
    }
    if (ok) return w;
  }
  throw std::runtime_error("gen_rankdef_W: retry budget exhausted");
}

namespace detail {

/// Uniform [0,1] draw whose singular values are replaced by a geometric ramp
/// descending from 1 to 1/kappa_target, so the condition number is exactly
/// kappa_target and the smallest singular direction has scale 1/kappa_target
/// (comparable to the noise grid). Not yet clamped.
inline Eigen::MatrixXd illcond_reconstruct(std::size_t m, std::size_t r,
                                           double kappa_target,
                                           SplitMix64& rng) {
  Eigen::MatrixXd w(m, r);
  for (std::size_t j = 0; j < r; ++j)
    for (std::size_t i = 0; i < m; ++i)
      w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rng.uniform01();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd s(r);
  for (std::size_t i = 0; i < r; ++i)
    s(static_cast<Eigen::Index>(i)) = std::pow(
        kappa_target, -static_cast<double>(i) / (static_cast<double>(r) - 1.0));
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace detail

/// Ill-conditioned basis: SVD-reshaped uniform draw (see
/// detail::illcond_reconstruct), clamped at zero entrywise. The clamp
/// changes the conditioning; only the pre-clamp condition number equals
/// kappa_target.
inline DenseMatrix gen_illcond_W(std::size_t m, std::size_t r,
                                 double kappa_target, SplitMix64& rng) {
  if (m < r) throw std::invalid_argument("gen_illcond_W: requires m >= r");
  if (r < 2 || kappa_target <= 0.0)
    throw std::invalid_argument("gen_illcond_W: bad parameters");

  DenseMatrix out(m, r);
  out.map() = detail::illcond_reconstruct(m, r, kappa_target, rng).cwiseMax(0.0);
  return out;
}

/// Assemble M~ = W H + N with the requested noise model and ground-truth
/// bookkeeping.
inline NearSeparableInstance add_noise(const DenseMatrix& w,
                                       const DenseMatrix& h, NoiseKind kind,
                                       double delta, SplitMix64& rng,
                                       std::uint64_t seed = 0) {
  if (delta < 0.0) throw std::invalid_argument("add_noise: negative delta");
  if (w.cols() != h.rows())
    throw std::invalid_argument("add_noise: W/H dimension mismatch");
  const std::size_t m = w.rows();
  const std::size_t r = w.cols();
  const std::size_t n = h.cols();

  NearSeparableInstance inst;
  inst.w = w;
  inst.h = h;
  inst.noise_delta = delta;
  inst.seed = seed;
  inst.noise = DenseMatrix(m, n);

  Eigen::MatrixXd clean = w.map() * h.map();

  if (kind == NoiseKind::Gaussian) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i)
        inst.noise(i, j) = delta * rng.normal();
    for (std::size_t j = 0; j < r; ++j)
      inst.duplicate_map[j] = {j, j + r};
  } else {
    // Untouched first r columns, outward push on the rest.
    Eigen::VectorXd wbar = w.map().rowwise().mean();
    for (std::size_t j = r; j < n; ++j)
      inst.noise.map().col(static_cast<Eigen::Index>(j)) =
          delta * (clean.col(static_cast<Eigen::Index>(j)) - wbar);
    for (std::size_t j = 0; j < r; ++j) inst.duplicate_map[j] = {j};
  }

  inst.m_tilde = DenseMatrix(m, n);
  inst.m_tilde.map() = clean + inst.noise.map();
  return inst;
}

/// Instance for one of the four synthetic ensembles, fully determined by the
/// spec (including its seed).
inline NearSeparableInstance make_instance(const EnsembleSpec& spec) {
  const bool rankdef = spec.kind == EnsembleKind::RankdefDirichlet ||
                       spec.kind == EnsembleKind::RankdefMiddle;
  const bool dirichlet = spec.kind == EnsembleKind::RankdefDirichlet ||
                         spec.kind == EnsembleKind::IllcondDirichlet;

  SplitMix64 w_rng(derive_seed(spec.seed, "W"));
  DenseMatrix w = rankdef
                      ? gen_rankdef_W(spec.m, spec.r, w_rng)
                      : gen_illcond_W(spec.m, spec.r, 1000.0, w_rng);

  SplitMix64 h_rng(derive_seed(spec.seed, "H"));
  DenseMatrix h = dirichlet ? gen_dirichlet_H(spec.r, 200, h_rng)
                            : gen_middlepoints_H(spec.r);

  SplitMix64 n_rng(derive_seed(spec.seed, "N"));
  return add_noise(w, h,
                   dirichlet ? NoiseKind::Gaussian : NoiseKind::MiddleOutward,
                   spec.delta, n_rng, spec.seed);
}

}  // namespace sepnmf
