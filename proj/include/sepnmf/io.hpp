#pragma once

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sepnmf/bench.hpp"
#include "sepnmf/matrix.hpp"

namespace sepnmf {

inline constexpr char kBinaryMagic[8] = {'S', 'E', 'P', 'N', 'M', 'F', '0', '1'};

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, end};
}

/// Headerless CSV of decimal reals, one matrix row per line.
inline DenseMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      std::size_t pos = 0;
      double v;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        throw std::runtime_error(path + ": unparseable value '" + cell + "'");
      }
      if (!std::isfinite(v))
        throw std::runtime_error(path + ": non-finite value");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error(path + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty() || rows.front().empty())
    throw std::runtime_error(path + ": empty matrix");
  DenseMatrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

inline void write_matrix_csv(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Binary format: 8-byte magic "SEPNMF01", two little-endian u64 dims
/// (rows, cols), then rows*cols little-endian IEEE-754 doubles in
/// column-major order.
inline void write_matrix_binary(const DenseMatrix& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out.write(kBinaryMagic, 8);
  std::uint64_t dims[2] = {m.rows(), m.cols()};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(m.rows() * m.cols() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline DenseMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kBinaryMagic, 8) != 0)
    throw std::runtime_error(path + ": bad magic");
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) throw std::runtime_error(path + ": truncated header");
  if (dims[0] == 0 || dims[1] == 0 || dims[0] * dims[1] > (1ull << 32))
    throw std::runtime_error(path + ": implausible dimensions");
  DenseMatrix m(dims[0], dims[1]);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(dims[0] * dims[1] * sizeof(double)));
  if (!in || in.gcount() !=
                 static_cast<std::streamsize>(dims[0] * dims[1] * sizeof(double)))
    throw std::runtime_error(path + ": truncated data");
  if (!m.all_finite()) throw std::runtime_error(path + ": non-finite entries");
  return m;
}

/// Dispatch on extension: ".bin" is binary, everything else CSV.
inline DenseMatrix read_matrix(const std::string& path) {
  if (std::filesystem::path(path).extension() == ".bin")
    return read_matrix_binary(path);
  return read_matrix_csv(path);
}

inline void write_matrix(const DenseMatrix& m, const std::string& path) {
  if (std::filesystem::path(path).extension() == ".bin")
    write_matrix_binary(m, path);
  else
    write_matrix_csv(m, path);
}

/// Schema: algorithm,delta,trial,fraction,runtime_s. Everything except the
/// runtime column is deterministic for a fixed seed.
inline void write_sweep_csv(const SweepReport& rep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "algorithm,delta,trial,fraction,runtime_s\n";
  for (std::size_t di = 0; di < rep.delta_grid.size(); ++di)
    for (std::size_t t = 0; t < rep.trials; ++t)
      out << rep.algorithm << ',' << format_double(rep.delta_grid[di]) << ','
          << t << ',' << format_double(rep.raw_fractions[di][t]) << ','
          << format_double(rep.raw_runtimes[di][t]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_summary_csv(const std::vector<SweepReport>& reports,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "algorithm,robustness_100,robustness_95,mean_runtime_s\n";
  for (const auto& rep : reports)
    out << rep.algorithm << ',' << format_double(rep.robustness_100) << ','
        << format_double(rep.robustness_95) << ','
        << format_double(rep.mean_runtime_s) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace sepnmf
