#include <catch2/catch_amalgamated.hpp>

#include "sepnmf/matrix.hpp"
#include "sepnmf/objective.hpp"
#include "sepnmf/rng.hpp"

using namespace sepnmf;

TEST_CASE("l1_normalize_columns divides by column l1 norms") {
  // column-major data
  DenseMatrix m(2, 2, {2, 2, 0, 4});
  auto [norm, rep] = l1_normalize_columns(m);
  REQUIRE(norm.rows() == 2);
  REQUIRE(norm.cols() == 2);
  CHECK(norm(0, 0) == Catch::Approx(0.5));
  CHECK(norm(1, 0) == Catch::Approx(0.5));
  CHECK(norm(0, 1) == Catch::Approx(0.0));
  CHECK(norm(1, 1) == Catch::Approx(1.0));
  REQUIRE(rep.kept_columns == std::vector<std::size_t>{0, 1});
  CHECK(rep.scale_factors[0] == Catch::Approx(4.0));
  CHECK(rep.scale_factors[1] == Catch::Approx(4.0));
}

TEST_CASE("l1_normalize_columns discards zero columns") {
  DenseMatrix m(2, 2, {0, 0, 1, 0});
  auto [norm, rep] = l1_normalize_columns(m, 0.0);
  REQUIRE(norm.cols() == 1);
  CHECK(norm(0, 0) == 1.0);
  CHECK(norm(1, 0) == 0.0);
  REQUIRE(rep.kept_columns == std::vector<std::size_t>{1});
}

TEST_CASE("l1_normalize_columns is the identity on stochastic input") {
  DenseMatrix m(2, 2, {0.25, 0.75, 0.6, 0.4});
  auto [norm, rep] = l1_normalize_columns(m);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(rep.scale_factors[j] == Catch::Approx(1.0));
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(norm(i, j) == Catch::Approx(m(i, j)));
  }
}

TEST_CASE("l1_normalize_columns errors when everything is dropped") {
  DenseMatrix m(2, 1, {0, 0});
  CHECK_THROWS(l1_normalize_columns(m));
}

TEST_CASE("normalization round trip and idempotence") {
  SplitMix64 rng(11);
  DenseMatrix m(4, 6);
  for (std::size_t j = 0; j < 6; ++j)
    for (std::size_t i = 0; i < 4; ++i) m(i, j) = rng.uniform01() - 0.2;

  auto [norm, rep] = l1_normalize_columns(m);
  for (std::size_t k = 0; k < rep.kept_columns.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(rep.scale_factors[k] * norm(i, k) ==
            Catch::Approx(m(i, rep.kept_columns[k])).margin(1e-14));

  auto [again, rep2] = l1_normalize_columns(norm);
  for (std::size_t j = 0; j < again.cols(); ++j)
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(std::abs(again(i, j) - norm(i, j)) <= 1e-14);
}

TEST_CASE("col_norms_l2") {
  DenseMatrix m(2, 3, {4, 0, 1, 1, 3, 1});
  auto norms = col_norms_l2(m);
  CHECK(norms[0] == Catch::Approx(4.0));
  CHECK(norms[1] == Catch::Approx(std::sqrt(2.0)));
  CHECK(norms[2] == Catch::Approx(std::sqrt(10.0)));

  auto id = col_norms_l2(DenseMatrix::identity(3));
  for (double v : id) CHECK(v == Catch::Approx(1.0));

  DenseMatrix z(2, 2, {0, 0, 1, 0});
  CHECK(col_norms_l2(z)[0] == 0.0);
}

TEST_CASE("squared l2 objective basics") {
  auto f = squared_l2_objective();
  std::vector<double> x{3, 4};
  CHECK(f.value(x) == Catch::Approx(25.0));
  std::vector<double> y{1, -2};
  auto g = f.gradient(y);
  CHECK(g[0] == Catch::Approx(2.0));
  CHECK(g[1] == Catch::Approx(-4.0));
  std::vector<double> zero{0, 0, 0};
  CHECK(f.value(zero) == 0.0);
  for (double v : f.gradient(zero)) CHECK(v == 0.0);
  CHECK(f.mu == 2.0);
  CHECK(f.lipschitz == 2.0);
}

TEST_CASE("objective sandwich holds on random probes") {
  auto f = squared_l2_objective();
  SplitMix64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> y(5);
    double nn = 0.0;
    for (auto& v : y) {
      v = rng.normal();
      nn += v * v;
    }
    double fy = f.value(y);
    CHECK(fy >= 0.5 * f.mu * nn - 1e-12);
    CHECK(fy <= 0.5 * f.lipschitz * nn + 1e-12);
  }
}

TEST_CASE("gradient matches central finite differences") {
  auto f = squared_l2_objective();
  SplitMix64 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> x(4);
    for (auto& v : x) v = rng.normal();
    auto g = f.gradient(x);
    const double h = 1e-6;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto xp = x, xm = x;
      xp[i] += h;
      xm[i] -= h;
      double fd = (f.value(xp) - f.value(xm)) / (2 * h);
      CHECK(g[i] == Catch::Approx(fd).epsilon(1e-6).margin(1e-6));
    }
  }
}
