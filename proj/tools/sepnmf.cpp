// sepnmf: benchmark and extraction CLI for near-separable NMF.
//
// Subcommands:
//   gen      generate a synthetic ensemble instance and write the data matrix
//   extract  run spa/snpa/xray on a matrix file
//   diag     conditioning diagnostics for a basis matrix W
//   sweep    noise-robustness sweep over a log-spaced delta grid
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sepnmf/sepnmf.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SEPNMF_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("SEPNMF_SEED is not an unsigned integer");
    }
  }
  return 0;
}

// "min:max:count" -> count log-spaced points, inclusive.
std::vector<double> parse_grid(const std::string& s) {
  auto c1 = s.find(':');
  auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw UsageError("--grid expects min:max:count");
  try {
    double lo = std::stod(s.substr(0, c1));
    double hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    std::size_t count = std::stoull(s.substr(c2 + 1));
    return sepnmf::logspace(lo, hi, count);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw UsageError(std::string("--grid: ") + e.what());
  }
}

void remove_quietly(const std::vector<std::string>& paths) {
  std::error_code ec;
  for (const auto& p : paths) std::filesystem::remove(p, ec);
}

sepnmf::EnsembleSpec build_spec(const std::string& ensemble, std::size_t m,
                                std::size_t r) {
  sepnmf::EnsembleSpec spec = sepnmf::EnsembleSpec::defaults(
      sepnmf::ensemble_kind_from_string(ensemble));
  if (m) spec.m = m;
  if (r) spec.r = r;
  return spec;
}

int cmd_gen(const std::string& ensemble, std::size_t m, std::size_t r,
            double delta, std::uint64_t seed, const std::string& output) {
  sepnmf::EnsembleSpec spec = build_spec(ensemble, m, r);
  spec.delta = delta;
  spec.seed = seed;
  auto inst = sepnmf::make_instance(spec);
  try {
    sepnmf::write_matrix(inst.m_tilde, output);
  } catch (...) {
    remove_quietly({output});
    throw;
  }
  std::cout << "wrote " << inst.m_tilde.rows() << "x" << inst.m_tilde.cols()
            << " matrix to " << output << "\n";
  return 0;
}

int cmd_extract(const std::string& input, const std::string& algo,
                std::size_t r, bool normalize, bool relative_error,
                const std::string& output, const std::string& abundances) {
  sepnmf::DenseMatrix m = sepnmf::read_matrix(input);
  sepnmf::DenseMatrix work = m;
  std::vector<std::size_t> kept(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) kept[j] = j;
  if (normalize) {
    auto [norm, rep] = sepnmf::l1_normalize_columns(m);
    work = std::move(norm);
    kept = rep.kept_columns;
  }

  sepnmf::StopCriteria stop;
  if (r < 1 || r > work.cols())
    throw UsageError("-r out of range for the input matrix");
  stop.target_r = r;

  sepnmf::ExtractionResult res;
  if (algo == "spa")
    res = sepnmf::spa(work, stop);
  else if (algo == "snpa")
    res = sepnmf::snpa(work, stop);
  else if (algo == "xray")
    res = sepnmf::xray_max(work, stop);
  else
    throw UsageError("--algo must be spa, snpa, or xray");

  // map back to original column indices if normalization dropped columns
  std::vector<std::size_t> indices;
  for (auto j : res.indices) indices.push_back(kept[j]);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw std::runtime_error("cannot open " + output);
    out = &file;
  }
  out->precision(17);
  *out << "step,index,max_f\n";
  for (std::size_t k = 0; k < indices.size(); ++k)
    *out << k << ',' << indices[k] << ',' << res.per_step_max_f[k] << '\n';
  if (relative_error)
    *out << "relative_error_percent,"
         << sepnmf::relative_error_percent(m, indices) << ",\n";
  if (!output.empty() && !file) {
    remove_quietly({output});
    throw std::runtime_error("write failed: " + output);
  }

  if (!abundances.empty()) {
    if (!res.coefficients)
      throw UsageError("--abundances requires --algo snpa or xray");
    try {
      sepnmf::write_matrix(*res.coefficients, abundances);
    } catch (...) {
      remove_quietly({abundances});
      throw;
    }
  }
  return 0;
}

int cmd_diag(const std::string& input, const std::string& output) {
  sepnmf::DenseMatrix w = sepnmf::read_matrix(input);
  auto rep = sepnmf::full_report(w);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw std::runtime_error("cannot open " + output);
    out = &file;
  }
  out->precision(17);
  *out << "alpha," << rep.alpha << "\n"
       << "nu," << rep.nu << "\n"
       << "gamma," << rep.gamma << "\n"
       << "omega," << rep.omega << "\n"
       << "k_norm," << rep.k_norm << "\n"
       << "sigma," << rep.sigma << "\n"
       << "beta," << rep.beta << "\n"
       << "beta_prime," << rep.beta_prime << "\n"
       << "kappa," << rep.kappa << "\n"
       << "kappa_beta," << rep.kappa_beta << "\n"
       << "exact_beta," << (rep.exact_beta ? 1 : 0) << "\n";
  if (!output.empty() && !file) {
    remove_quietly({output});
    throw std::runtime_error("write failed: " + output);
  }
  return 0;
}

int cmd_sweep(const std::string& ensemble, std::size_t m, std::size_t r,
              const std::string& grid_spec, std::size_t trials,
              std::uint64_t seed, std::vector<std::string> algos,
              std::size_t jobs, const std::string& out_prefix) {
  if (trials < 1) throw UsageError("--trials must be >= 1");
  if (algos.empty()) algos = {"spa", "snpa", "xray"};
  auto grid = parse_grid(grid_spec);

  sepnmf::EnsembleSpec spec = build_spec(ensemble, m, r);
  sepnmf::SweepOptions opts;
  opts.jobs = jobs;

  auto reports = sepnmf::run_sweep(spec, algos, grid, trials, seed, opts);

  std::vector<std::string> written;
  try {
    for (const auto& rep : reports) {
      std::string path = out_prefix + "_" + rep.algorithm + ".csv";
      written.push_back(path);
      sepnmf::write_sweep_csv(rep, path);
    }
    std::string summary = out_prefix + "_summary.csv";
    written.push_back(summary);
    sepnmf::write_summary_csv(reports, summary);
  } catch (...) {
    remove_quietly(written);
    throw;
  }

  for (const auto& rep : reports)
    std::cout << rep.algorithm << ": robustness_100=" << rep.robustness_100
              << " robustness_95=" << rep.robustness_95
              << " mean_runtime_s=" << rep.mean_runtime_s << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"near-separable NMF benchmark tool"};
  app.require_subcommand(1);

  std::string ensemble = "rankdef-dirichlet";
  std::string grid_spec = "1e-3:1:20";
  std::string input, output, abundances, algo = "snpa", out_prefix = "sweep";
  std::vector<std::string> algos;
  std::size_t trials = 10, r = 1, jobs = 0, ens_m = 0, ens_r = 0;
  std::uint64_t seed = 0;
  bool seed_given = false, normalize = false, relative_error = false;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (default: $SEPNMF_SEED or 0)")
        ->each([&](const std::string&) { seed_given = true; });
  };

  auto* gen = app.add_subcommand("gen", "generate a synthetic instance");
  gen->add_option("--ensemble", ensemble,
                  "rankdef-dirichlet | rankdef-middle | illcond-dirichlet | "
                  "illcond-middle");
  double delta = 0.0;
  gen->add_option("--delta", delta, "noise level")->check(CLI::NonNegativeNumber);
  gen->add_option("--m", ens_m, "ambient dimension override");
  gen->add_option("--r", ens_r, "inner rank override");
  add_seed(gen);
  gen->add_option("--output", output, "matrix file (.csv or .bin)")->required();

  auto* extract = app.add_subcommand("extract", "run one extraction");
  extract->add_option("--input", input, "matrix file")->required();
  extract->add_option("--algo", algo, "spa | snpa | xray");
  extract->add_option("-r,--rank", r, "number of columns to extract")
      ->required();
  extract->add_flag("--normalize", normalize, "l1-normalize columns first");
  extract->add_flag("--relative-error", relative_error,
                    "append the reconstruction error percentage");
  extract->add_option("--output", output, "per-step CSV (default: stdout)");
  extract->add_option("--abundances", abundances,
                      "write the coefficient matrix H*");

  auto* diag = app.add_subcommand("diag", "conditioning diagnostics for W");
  diag->add_option("--input", input, "matrix file")->required();
  diag->add_option("--output", output, "key,value CSV (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "noise-robustness sweep");
  sweep->add_option("--ensemble", ensemble, "ensemble kind");
  sweep->add_option("--m", ens_m, "ambient dimension override");
  sweep->add_option("--r", ens_r, "inner rank override");
  sweep->add_option("--grid", grid_spec, "min:max:count (log-spaced)");
  sweep->add_option("--trials", trials, "trials per grid point");
  sweep->add_option("--algos", algos, "subset of spa snpa xray")
      ->delimiter(',');
  sweep->add_option("--jobs", jobs, "worker threads (0 = all cores)");
  sweep->add_option("--out-prefix", out_prefix,
                    "output prefix for per-algorithm and summary CSVs");
  add_seed(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (!seed_given) seed = default_seed();
    if (gen->parsed())
      return cmd_gen(ensemble, ens_m, ens_r, delta, seed, output);
    if (extract->parsed())
      return cmd_extract(input, algo, r, normalize, relative_error, output,
                         abundances);
    if (diag->parsed()) return cmd_diag(input, output);
    if (sweep->parsed())
      return cmd_sweep(ensemble, ens_m, ens_r, grid_spec, trials, seed, algos,
                       jobs, out_prefix);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
