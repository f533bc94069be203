#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sepnmf/algorithms.hpp"
#include "sepnmf/datagen.hpp"
#include "sepnmf/matrix.hpp"

namespace sepnmf {

struct SweepReport {
  std::string algorithm;
  std::vector<double> delta_grid;
  std::vector<double> fractions;                  // mean per delta
  std::vector<std::vector<double>> raw_fractions; // [delta][trial]
  std::vector<std::vector<double>> raw_runtimes;  // [delta][trial], seconds
  double robustness_100 = 0.0;
  double robustness_95 = 0.0;
  double mean_runtime_s = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

/// Fraction of ground-truth columns whose duplicate set intersects the
/// extracted index list. Index-set based, no distance threshold.
inline double recovery_fraction(const ExtractionResult& result,
                                const NearSeparableInstance& instance) {
  const std::size_t r = instance.w.cols();
  std::size_t hit = 0;
  for (const auto& [j, dups] : instance.duplicate_map) {
    bool found = false;
    for (std::size_t d : dups)
      for (std::size_t k : result.indices)
        if (k == d) found = true;
    if (found) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(r);
}

/// Largest grid delta whose mean fraction reaches the level; 0 if none.
inline std::pair<double, double> robustness_thresholds(
    const std::vector<double>& fractions, const std::vector<double>& grid) {
  if (fractions.size() != grid.size())
    throw std::invalid_argument("robustness_thresholds: size mismatch");
  double r100 = 0.0, r95 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (fractions[i] >= 1.0 - 1e-9) r100 = std::max(r100, grid[i]);
    if (fractions[i] >= 0.95 - 1e-9) r95 = std::max(r95, grid[i]);
  }
  return {r100, r95};
}

/// count log-spaced points from lo to hi inclusive.
inline std::vector<double> logspace(double lo, double hi, std::size_t count) {
  if (lo <= 0.0 || hi <= 0.0 || hi < lo || count < 1)
    throw std::invalid_argument("logspace: bad range");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = hi;
    return out;
  }
  double llo = std::log10(lo), lhi = std::log10(hi);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = std::pow(10.0, llo + (lhi - llo) * static_cast<double>(i) /
                                static_cast<double>(count - 1));
  return out;
}

/// Relative reconstruction error in percent for the column subset K, with
/// the coefficients fitted by nonnegative least squares.
inline double relative_error_percent(const DenseMatrix& m,
                                     const std::vector<std::size_t>& k,
                                     const FgmOptions& fgm_opts = {}) {
  double m_norm = m.map().norm();
  if (m_norm == 0.0)
    throw std::invalid_argument("relative_error_percent: zero matrix");
  DenseMatrix basis = m.select_columns(k);
  DenseMatrix h = fgm_nonneg_ls(basis, m, fgm_opts);
  double err = (m.map() - basis.map() * h.map()).norm();
  return 100.0 * err / m_norm;
}

namespace detail {

inline ExtractionResult run_algorithm(const std::string& name,
                                      const NearSeparableInstance& inst,
                                      const StopCriteria& stop,
                                      const FgmOptions& fgm_opts) {
  if (name == "spa") return spa(inst.m_tilde, stop);
  if (name == "snpa")
    return snpa(inst.m_tilde, stop, squared_l2_objective(), fgm_opts);
  if (name == "xray") {
    // XRAY requires nonnegative input; noisy instances are clamped at zero
    // before extraction (mirroring the clamp applied to W at generation).
    DenseMatrix clamped = inst.m_tilde;
    clamped.map() = clamped.map().cwiseMax(0.0);
    return xray_max(clamped, stop, fgm_opts);
  }
  throw std::invalid_argument("unknown algorithm: " + name);
}

}  // namespace detail

struct SweepOptions {
  FgmOptions fgm;
  std::size_t jobs = 0;  // 0 = hardware concurrency
};

/// Noise sweep: for each (delta, trial) cell, generate an instance from a
/// derived seed, run every algorithm on it, and score recovery. Instances
/// are shared across algorithms so comparisons use the same data.
inline std::vector<SweepReport> run_sweep(
    const EnsembleSpec& spec_template,
    const std::vector<std::string>& algorithms, const std::vector<double>& grid,
    std::size_t trials, std::uint64_t seed, const SweepOptions& opts = {}) {
  if (grid.empty()) throw std::invalid_argument("run_sweep: empty grid");
  if (trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
  if (algorithms.empty())
    throw std::invalid_argument("run_sweep: no algorithms");

  const std::size_t n_cells = grid.size() * trials;
  const std::size_t n_alg = algorithms.size();
  std::vector<double> fractions(n_cells * n_alg, 0.0);
  std::vector<double> runtimes(n_cells * n_alg, 0.0);
  std::vector<std::string> errors(n_cells);

  auto run_cell = [&](std::size_t cell) {
    const std::size_t di = cell / trials;
    const std::size_t trial = cell % trials;
    try {
      EnsembleSpec spec = spec_template;
      spec.delta = grid[di];
      spec.seed = derive_seed(seed, "sweep-cell", cell);
      NearSeparableInstance inst = make_instance(spec);
      StopCriteria stop;
      stop.target_r = spec.r;
      for (std::size_t a = 0; a < n_alg; ++a) {
        auto t0 = std::chrono::steady_clock::now();
        ExtractionResult res =
            detail::run_algorithm(algorithms[a], inst, stop, opts.fgm);
        auto t1 = std::chrono::steady_clock::now();
        fractions[cell * n_alg + a] = recovery_fraction(res, inst);
        runtimes[cell * n_alg + a] =
            std::chrono::duration<double>(t1 - t0).count();
      }
    } catch (const std::exception& e) {
      errors[cell] = e.what();
    }
  };

  std::size_t jobs = opts.jobs ? opts.jobs : std::thread::hardware_concurrency();
  if (jobs <= 1 || n_cells == 1) {
    for (std::size_t c = 0; c < n_cells; ++c) run_cell(c);
  } else {
    std::vector<std::thread> workers;
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < std::min(jobs, n_cells); ++t)
      workers.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < n_cells;
             c = next.fetch_add(1))
          run_cell(c);
      });
    for (auto& w : workers) w.join();
  }

  for (std::size_t c = 0; c < n_cells; ++c)
    if (!errors[c].empty())
      throw std::runtime_error("run_sweep: cell " + std::to_string(c) +
                               " failed: " + errors[c]);

  std::vector<SweepReport> reports(n_alg);
  for (std::size_t a = 0; a < n_alg; ++a) {
    SweepReport& rep = reports[a];
    rep.algorithm = algorithms[a];
    rep.delta_grid = grid;
    rep.trials = trials;
    rep.seed = seed;
    double total_time = 0.0;
    for (std::size_t di = 0; di < grid.size(); ++di) {
      std::vector<double> raw(trials);
      std::vector<double> raw_t(trials);
      double sum = 0.0;
      for (std::size_t t = 0; t < trials; ++t) {
        std::size_t cell = di * trials + t;
        raw[t] = fractions[cell * n_alg + a];
        raw_t[t] = runtimes[cell * n_alg + a];
        sum += raw[t];
        total_time += raw_t[t];
      }
      rep.raw_fractions.push_back(std::move(raw));
      rep.raw_runtimes.push_back(std::move(raw_t));
      rep.fractions.push_back(sum / static_cast<double>(trials));
    }
    auto [r100, r95] = robustness_thresholds(rep.fractions, grid);
    rep.robustness_100 = r100;
    rep.robustness_95 = r95;
    rep.mean_runtime_s = total_time / static_cast<double>(n_cells);
  }
  return reports;
}

}  // namespace sepnmf
