#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dnmf/nnls.hpp"

using namespace dnmf;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng, double lo,
                     double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (double& x : m.values()) x = dist(rng);
  return m;
}

double residual_sq(const Matrix& m, const Vector& x, const Vector& b) {
  const Vector mx = matvec(m, x);
  double acc = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double d = mx[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Exhaustive oracle for p = 2: best residual over a grid.
double grid_best_residual(const Matrix& m, const Vector& b, double hi, double step) {
  double best = residual_sq(m, Vector{0.0, 0.0}, b);
  for (double x0 = 0.0; x0 <= hi; x0 += step)
    for (double x1 = 0.0; x1 <= hi; x1 += step)
      best = std::min(best, residual_sq(m, Vector{x0, x1}, b));
  return best;
}

void check_kkt(const Matrix& m, const Vector& b, const Vector& x, double tol) {
  // gradient of 0.5|Mx-b|^2 is M'(Mx - b)
  const Vector mx = matvec(m, x);
  Vector r(mx.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = mx[i] - b[i];
  const Vector grad = matvec(transpose(m), r);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0)
      CHECK(std::abs(grad[i]) <= tol);
    else
      CHECK(grad[i] >= -tol);
  }
}

}  // namespace

TEST_CASE("identity problem returns b") {
  const Vector x = nnls_vector(Matrix::identity(2), Vector{1, 2});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("negative target clamps to the boundary") {
  const Vector x = nnls_vector(Matrix::from_rows({{1}}), Vector{-1});
  CHECK(x[0] == 0.0);
}

TEST_CASE("grid oracle agreement for p=2") {
  const Matrix m = Matrix::from_rows({{1, 1}, {0, 1}});
  const Vector b{1, 1};
  const Vector x = nnls_vector(m, b);
  const double grid = grid_best_residual(m, b, 2.0, 1e-3);
  CHECK(residual_sq(m, x, b) <= grid + 1e-5);

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix mr = random_matrix(3, 2, rng, -1.0, 1.0);
    Vector br(3);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : br) v = dist(rng);
    const Vector xr = nnls_vector(mr, br);
    CHECK(residual_sq(mr, xr, br) <= grid_best_residual(mr, br, 2.0, 1e-3) + 1e-5);
  }
}

TEST_CASE("KKT conditions hold on random instances") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m_rows = 1 + rng() % 8;
    const std::size_t p = 1 + rng() % 8;
    const bool signed_m = trial % 2 == 0;
    const Matrix m = random_matrix(m_rows, p, rng, signed_m ? -1.0 : 0.0, 1.0);
    Vector b(m_rows);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& v : b) v = dist(rng);
    const Vector x = nnls_vector(m, b);
    for (double v : x) CHECK(v >= 0.0);
    check_kkt(m, b, x, 1e-10);
    // never worse than the zero vector
    CHECK(residual_sq(m, x, b) <= residual_sq(m, Vector(p, 0.0), b) + 1e-12);
  }
}

TEST_CASE("nnls is deterministic") {
  std::mt19937_64 rng(7);
  const Matrix m = random_matrix(6, 4, rng, -1.0, 1.0);
  Vector b(6);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& v : b) v = dist(rng);
  CHECK(nnls_vector(m, b) == nnls_vector(m, b));
}

TEST_CASE("iteration limit carries the best iterate") {
  std::mt19937_64 rng(9);
  const Matrix m = random_matrix(6, 5, rng, 0.0, 1.0);
  Vector b(6, 1.0);
  NnlsConfig cfg;
  cfg.max_iters = 1;  // cannot finish a multi-column active set
  try {
    const Vector full = nnls_vector(m, b);
    // only meaningful if the unrestricted solve needs more than one pass
    std::size_t support = 0;
    for (double v : full) support += v > 0.0 ? 1 : 0;
    if (support > 1) {
      CHECK_THROWS_AS(nnls_vector(m, b, cfg), IterationLimitError);
      try {
        nnls_vector(m, b, cfg);
      } catch (const IterationLimitError& e) {
        CHECK(e.best_iterate().size() == 5);
        for (double v : e.best_iterate()) CHECK(v >= 0.0);
      }
    }
  } catch (const IterationLimitError&) {
    FAIL("default budget should be enough here");
  }
}

TEST_CASE("estimate_w with identity coefficients returns V") {
  std::mt19937_64 rng(11);
  const Matrix v = random_matrix(5, 3, rng, 0.0, 1.0);
  const Matrix w = estimate_w(v, Matrix::identity(3));
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(w.values()[i] == doctest::Approx(v.values()[i]).epsilon(1e-10));
}

TEST_CASE("estimate_w construct-and-recover") {
  std::mt19937_64 rng(13);
  const Matrix w_true = random_matrix(8, 3, rng, 0.0, 1.0);
  const Matrix h = random_matrix(3, 20, rng, 0.5, 1.5);  // well conditioned
  const Matrix v = matmul(w_true, h);
  const Matrix w = estimate_w(v, h);
  double err = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double d = w.values()[i] - w_true.values()[i];
    err += d * d;
  }
  CHECK(std::sqrt(err) < 1e-6);
}

TEST_CASE("estimate_w zero V row gives a zero W row") {
  std::mt19937_64 rng(17);
  Matrix v = random_matrix(4, 6, rng, 0.0, 1.0);
  for (std::size_t j = 0; j < v.cols(); ++j) v(2, j) = 0.0;
  const Matrix h = random_matrix(2, 6, rng, 0.1, 1.0);
  const Matrix w = estimate_w(v, h);
  CHECK(w(2, 0) == 0.0);
  CHECK(w(2, 1) == 0.0);
}

TEST_CASE("estimate_w rejects an all-zero H row") {
  Matrix h(2, 4, 1.0);
  for (std::size_t j = 0; j < 4; ++j) h(1, j) = 0.0;
  const Matrix v(3, 4, 1.0);
  CHECK_THROWS_AS(estimate_w(v, h), DegenerateDictionaryError);
  try {
    estimate_w(v, h);
  } catch (const DegenerateDictionaryError& e) {
    CHECK(e.row() == 1);
  }
}

TEST_CASE("estimate_w beats the all-ones W") {
  std::mt19937_64 rng(19);
  const Matrix v = random_matrix(6, 10, rng, 0.0, 2.0);
  const Matrix h = random_matrix(3, 10, rng, 0.1, 1.0);
  const Matrix w = estimate_w(v, h);
  const Matrix ones(6, 3, 1.0);
  double fit = 0.0, base = 0.0;
  const Matrix wh = matmul(w, h);
  const Matrix oh = matmul(ones, h);
  for (std::size_t i = 0; i < v.size(); ++i) {
    fit += (v.values()[i] - wh.values()[i]) * (v.values()[i] - wh.values()[i]);
    base += (v.values()[i] - oh.values()[i]) * (v.values()[i] - oh.values()[i]);
  }
  CHECK(fit <= base + 1e-12);
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(nnls_vector(Matrix(2, 2, 1.0), Vector{1, 2, 3}), DimensionError);
  CHECK_THROWS_AS(estimate_w(Matrix(3, 4, 1.0), Matrix(2, 5, 1.0)), DimensionError);
}
