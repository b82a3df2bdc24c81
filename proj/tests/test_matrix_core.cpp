#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <random>

#include "dnmf/cost.hpp"
#include "dnmf/matrix.hpp"

using namespace dnmf;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                     double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (double& x : m.values()) x = dist(rng);
  return m;
}

}  // namespace

TEST_CASE("hadamard") {
  CHECK(hadamard(Vector{1, 2}, Vector{3, 4}) == Vector{3, 8});
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows({{2, 0}, {1, 5}});
  const Matrix c = hadamard(a, b);
  CHECK(c(0, 0) == 2);
  CHECK(c(0, 1) == 0);
  CHECK(c(1, 1) == 20);
  CHECK_THROWS_AS(hadamard(a, Matrix(3, 2)), DimensionError);
}

TEST_CASE("safe_divide clamps small denominators") {
  const Vector out = safe_divide(Vector{1, 1}, Vector{2, 0});
  CHECK(out[0] == doctest::Approx(0.5));
  CHECK(out[1] == doctest::Approx(1e12));
  const Matrix num(2, 2, 1.0);
  Matrix den(2, 2, 4.0);
  den(1, 1) = 1e-15;  // below the clamp
  const Matrix q = safe_divide(num, den);
  CHECK(q(0, 0) == doctest::Approx(0.25));
  CHECK(q(1, 1) == doctest::Approx(1e12));
}

TEST_CASE("matvec and matmul") {
  CHECK(matvec(Matrix::identity(2), Vector{5, 7}) == Vector{5, 7});
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
  const Matrix c = matmul(a, b);
  CHECK(c(0, 0) == 19);
  CHECK(c(0, 1) == 22);
  CHECK(c(1, 0) == 43);
  CHECK(c(1, 1) == 50);
  CHECK_THROWS_AS(matvec(a, Vector{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(matmul(a, Matrix(3, 2)), DimensionError);
}

TEST_CASE("transpose") {
  const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const Matrix t = transpose(a);
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 2);
  CHECK(t(2, 0) == 3);
  CHECK(t(0, 1) == 4);
  CHECK(transpose(t) == a);
}

TEST_CASE("kernels preserve non-negativity") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + rng() % 6;
    const std::size_t c = 1 + rng() % 6;
    const Matrix a = random_matrix(r, c, rng);
    const Matrix b = random_matrix(r, c, rng);
    const Matrix had = hadamard(a, b);
    for (double x : had.values()) CHECK(x >= 0.0);
    const Matrix div = safe_divide(a, b);
    for (double x : div.values()) CHECK(x >= 0.0);
    const Matrix d = random_matrix(c, r, rng);
    const Matrix mul = matmul(a, d);
    for (double x : mul.values()) CHECK(x >= 0.0);
  }
}

TEST_CASE("column_cost examples") {
  const RegParams none;
  CHECK(column_cost(Vector{1, 0}, Matrix::identity(2), Vector{1, 0}, none) == 0.0);
  // exact fit, penalties only: 0 + 1*1 + 0.5*2*1 = 2
  CHECK(column_cost(Vector{1, 0}, Matrix::identity(2), Vector{1, 0}, RegParams{1, 2}) ==
        doctest::Approx(2.0));
  // residual only: 0.5*((1-1)^2 + (3-1)^2) = 2
  CHECK(column_cost(Vector{1, 3}, Matrix::from_rows({{1}, {1}}), Vector{1}, none) ==
        doctest::Approx(2.0));
  CHECK_THROWS_AS(column_cost(Vector{1, 2, 3}, Matrix::identity(2), Vector{1, 0}, none),
                  DimensionError);
  CHECK_THROWS_AS(column_cost(Vector{1, 0}, Matrix::identity(2), Vector{1, 0}, RegParams{-1, 0}),
                  ConfigError);
}

TEST_CASE("column_cost is invariant under simultaneous row permutation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t f = 2 + rng() % 5;
    const std::size_t k = 1 + rng() % 4;
    const Matrix w = random_matrix(f, k, rng);
    Vector v(f), h(k);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (double& x : v) x = dist(rng);
    for (double& x : h) x = dist(rng);
    const RegParams reg{dist(rng), dist(rng)};

    std::vector<std::size_t> perm(f);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix wp(f, k);
    Vector vp(f);
    for (std::size_t i = 0; i < f; ++i) {
      vp[i] = v[perm[i]];
      for (std::size_t j = 0; j < k; ++j) wp(i, j) = w(perm[i], j);
    }
    CHECK(column_cost(vp, wp, h, reg) ==
          doctest::Approx(column_cost(v, w, h, reg)).epsilon(1e-12));
  }
}

TEST_CASE("matrix_cost examples and column decomposition") {
  const RegParams none;
  std::mt19937_64 rng(13);
  const Matrix w = random_matrix(4, 2, rng);
  const Matrix h = random_matrix(2, 3, rng);
  const Matrix v = matmul(w, h);
  CHECK(matrix_cost(v, w, h, none) == 0.0);

  // V = [[1,1],[0,0]], W = I, H = V, reg l1=1: 0 + 1*(1+1) = 2
  const Matrix v2 = Matrix::from_rows({{1, 1}, {0, 0}});
  CHECK(matrix_cost(v2, Matrix::identity(2), v2, RegParams{1, 0}) == doctest::Approx(2.0));

  // single column: equals column_cost
  const Matrix v1 = Matrix::from_rows({{1}, {3}});
  const Matrix w1 = Matrix::from_rows({{1}, {1}});
  const Matrix h1 = Matrix::from_rows({{1}});
  CHECK(matrix_cost(v1, w1, h1, none) == column_cost(Vector{1, 3}, w1, Vector{1}, none));

  // exact column-sum decomposition (same summation order)
  const RegParams reg{0.3, 0.7};
  const Matrix vr = random_matrix(5, 4, rng);
  const Matrix wr = random_matrix(5, 3, rng);
  const Matrix hr = random_matrix(3, 4, rng);
  double by_columns = 0.0;
  for (std::size_t j = 0; j < vr.cols(); ++j)
    by_columns += column_cost(vr.column(j), wr, hr.column(j), reg);
  CHECK(matrix_cost(vr, wr, hr, reg) == by_columns);
}

TEST_CASE("mse_columns") {
  const Matrix x = Matrix::from_rows({{1}, {1}});
  const Matrix y(2, 1, 0.0);
  CHECK(mse_columns(x, y) == doctest::Approx(1.0));
  CHECK(mse_columns(x, x) == 0.0);
  CHECK(mse_columns(y, x) == mse_columns(x, y));

  std::mt19937_64 rng(17);
  const Matrix a = random_matrix(4, 6, rng);
  const Matrix b = random_matrix(4, 6, rng);
  CHECK(mse_columns(a, b) == mse_columns(b, a));

  // identical column permutation of both arguments leaves the value unchanged
  std::vector<int> perm(6);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  CHECK(mse_columns(gather_columns(a, perm), gather_columns(b, perm)) ==
        doctest::Approx(mse_columns(a, b)).epsilon(1e-14));

  CHECK_THROWS_AS(mse_columns(a, Matrix(4, 5)), DimensionError);
}

TEST_CASE("gather_columns") {
  const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  const Matrix g = gather_columns(a, {2, 0});
  CHECK(g(0, 0) == 3);
  CHECK(g(1, 1) == 4);
  CHECK_THROWS_AS(gather_columns(a, {3}), DimensionError);
}
