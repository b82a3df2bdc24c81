#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "dnmf/mu.hpp"

using namespace dnmf;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.values()) x = 1.0 - dist(rng);  // (0,1]
  return m;
}

}  // namespace

TEST_CASE("update_h fixed point with identity dictionary") {
  const Matrix w = Matrix::identity(2);
  const Matrix v = Matrix::from_rows({{2}, {3}});
  const Matrix h = Matrix::from_rows({{2}, {3}});
  const Matrix out = update_h(h, w, v, RegParams{});
  CHECK(out(0, 0) == doctest::Approx(2.0));
  CHECK(out(1, 0) == doctest::Approx(3.0));
}

TEST_CASE("update_h one-dimensional least squares") {
  const Matrix w = Matrix::from_rows({{1}, {1}});
  const Matrix v = Matrix::from_rows({{1}, {3}});
  const Matrix h = Matrix::from_rows({{1}});

  // unregularized: one step lands on the exact solution h = 4/2 = 2
  const Matrix step = update_h(h, w, v, RegParams{});
  CHECK(step(0, 0) == doctest::Approx(2.0));

  // l1-regularized: first step 4/3, iterates approach the stationary point
  // of 0.5(1-h)^2 + 0.5(3-h)^2 + h, which is 1.5
  const RegParams reg{1.0, 0.0};
  Matrix cur = update_h(h, w, v, reg);
  CHECK(cur(0, 0) == doctest::Approx(4.0 / 3.0));
  for (int it = 0; it < 500; ++it) cur = update_h(cur, w, v, reg);
  CHECK(cur(0, 0) == doctest::Approx(1.5).epsilon(1e-6));
}

TEST_CASE("update_w examples") {
  std::mt19937_64 rng(3);
  const Matrix w = random_matrix(4, 2, rng);
  // H = I, V = W exactly: W unchanged
  const Matrix out = update_w(w, Matrix::identity(2), w);
  for (std::size_t i = 0; i < w.size(); ++i)
    CHECK(out.values()[i] == doctest::Approx(w.values()[i]).epsilon(1e-12));

  // scalar exact solution
  const Matrix one = Matrix::from_rows({{1}});
  const Matrix two = Matrix::from_rows({{2}});
  CHECK(update_w(one, one, two)(0, 0) == doctest::Approx(2.0));

  // a zero row stays zero
  Matrix wz = random_matrix(3, 2, rng);
  wz(1, 0) = 0.0;
  wz(1, 1) = 0.0;
  const Matrix vz = random_matrix(3, 5, rng);
  const Matrix hz = random_matrix(2, 5, rng);
  const Matrix next = update_w(wz, hz, vz);
  CHECK(next(1, 0) == 0.0);
  CHECK(next(1, 1) == 0.0);
}

TEST_CASE("update_h zero entries stay zero") {
  std::mt19937_64 rng(5);
  Matrix h = random_matrix(3, 4, rng);
  h(0, 1) = 0.0;
  h(2, 2) = 0.0;
  const Matrix w = random_matrix(5, 3, rng);
  const Matrix v = random_matrix(5, 4, rng);
  const Matrix out = update_h(h, w, v, RegParams{0.5, 0.5});
  CHECK(out(0, 1) == 0.0);
  CHECK(out(2, 2) == 0.0);
}

TEST_CASE("update_h fixed-point characterization") {
  // With W = I the denominator is H + l1 + l2 H; choosing V equal to it makes
  // the ratio exactly one on the support.
  std::mt19937_64 rng(7);
  const RegParams reg{0.5, 0.25};
  Matrix h = random_matrix(3, 4, rng);
  h(1, 2) = 0.0;
  const Matrix w = Matrix::identity(3);
  Matrix v = matmul(matmul(transpose(w), w), h);
  for (std::size_t i = 0; i < v.size(); ++i)
    v.values()[i] += reg.lambda1 + reg.lambda2 * h.values()[i];
  const Matrix out = update_h(h, w, v, reg);
  for (std::size_t i = 0; i < h.size(); ++i)
    CHECK(out.values()[i] == doctest::Approx(h.values()[i]).epsilon(1e-14));
  CHECK(out(1, 2) == 0.0);
}

TEST_CASE("monotonicity of both updates") {
  std::mt19937_64 rng(11);
  const double lambdas[] = {0.0, 1.0, 2.0};
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t f = 1 + rng() % 8;
    const std::size_t n = 1 + rng() % 8;
    const std::size_t k = 1 + rng() % std::min<std::size_t>(8, std::min(f, n));
    const RegParams reg{lambdas[rng() % 3], lambdas[rng() % 3]};
    const Matrix v = random_matrix(f, n, rng);
    Matrix w = random_matrix(f, k, rng);
    Matrix h = random_matrix(k, n, rng);

    const double before_h = matrix_cost(v, w, h, reg);
    h = update_h(h, w, v, reg);
    const double after_h = matrix_cost(v, w, h, reg);
    CHECK(after_h <= before_h + 1e-10 * (1.0 + before_h));

    const double before_w = matrix_cost(v, w, h, reg);
    w = update_w(w, h, v);
    const double after_w = matrix_cost(v, w, h, reg);
    CHECK(after_w <= before_w + 1e-10 * (1.0 + before_w));
  }
}

TEST_CASE("factorize recovers a rank-1 matrix") {
  std::mt19937_64 rng(13);
  const Matrix w_true = random_matrix(6, 1, rng);
  const Matrix h_true = random_matrix(1, 9, rng);
  const Matrix v = matmul(w_true, h_true);
  MuConfig cfg;
  cfg.tol = 0.0;
  const FactorizationResult res = factorize(v, 1, cfg);
  CHECK(res.iters_run <= 200);
  CHECK(res.cost_trace.back() < 1e-6);
}

TEST_CASE("factorize cost trace is non-increasing") {
  std::mt19937_64 rng(17);
  const Matrix v = random_matrix(5, 5, rng);
  MuConfig cfg;
  cfg.max_iters = 100;
  cfg.reg = RegParams{0.5, 0.5};
  const FactorizationResult res = factorize(v, 5, cfg);
  CHECK(res.cost_trace.back() <= res.cost_trace.front());
  for (std::size_t i = 1; i < res.cost_trace.size(); ++i)
    CHECK(res.cost_trace[i] <= res.cost_trace[i - 1] + 1e-10 * (1.0 + res.cost_trace[i - 1]));
}

TEST_CASE("large l1 shrinks the coefficients") {
  std::mt19937_64 rng(19);
  const Matrix v = random_matrix(6, 8, rng);
  MuConfig base;
  base.init = InitKind::kRandomUniform;
  base.seed = 42;
  MuConfig heavy = base;
  heavy.reg = RegParams{1e6, 0.0};
  const Matrix h_plain = factorize(v, 2, base).h;
  const Matrix h_heavy = factorize(v, 2, heavy).h;
  double l1_plain = 0.0, l1_heavy = 0.0;
  for (double x : h_plain.values()) l1_plain += x;
  for (double x : h_heavy.values()) l1_heavy += x;
  CHECK(l1_heavy < l1_plain);
}

TEST_CASE("factorize validates k") {
  const Matrix v(4, 3, 1.0);
  CHECK_THROWS_AS(factorize(v, 4, MuConfig{}), ConfigError);
  CHECK_THROWS_AS(factorize(v, 0, MuConfig{}), ConfigError);
}

TEST_CASE("restarts are deterministic and pick the best cost") {
  std::mt19937_64 rng(23);
  const Matrix v = random_matrix(6, 6, rng);
  MuConfig cfg;
  cfg.init = InitKind::kRandomUniform;
  cfg.seed = 5;
  cfg.restarts = 4;
  cfg.max_iters = 50;
  const FactorizationResult a = factorize(v, 2, cfg);
  const FactorizationResult b = factorize(v, 2, cfg);
  CHECK(a.h == b.h);
  CHECK(a.w == b.w);

  // the multi-restart result is at least as good as any single restart
  for (int r = 0; r < 4; ++r) {
    MuConfig single = cfg;
    single.restarts = 1;
    single.seed = cfg.seed + static_cast<std::uint64_t>(r);
    const FactorizationResult one = factorize(v, 2, single);
    CHECK(a.cost_trace.back() <= one.cost_trace.back() + 1e-12);
  }
}

TEST_CASE("infer_h recovers coefficients in the column space of W") {
  std::mt19937_64 rng(29);
  const Matrix w = random_matrix(6, 3, rng);
  const Matrix h_true = random_matrix(3, 4, rng);
  const Matrix v = matmul(w, h_true);
  MuConfig cfg = MuConfig::inference();
  cfg.max_iters = 10000;
  cfg.tol = 0.0;
  const Matrix h = infer_h(v, w, cfg);
  const Matrix recon = matmul(w, h);
  double resid = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v.values()[i] - recon.values()[i];
    resid += d * d;
  }
  CHECK(std::sqrt(resid) < 1e-6);
}

TEST_CASE("infer_h with identity dictionary approaches V") {
  std::mt19937_64 rng(31);
  const Matrix v = random_matrix(3, 5, rng);
  MuConfig cfg = MuConfig::inference();
  cfg.max_iters = 4000;
  cfg.tol = 0.0;
  const Matrix h = infer_h(v, Matrix::identity(3), cfg);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(h.values()[i] == doctest::Approx(v.values()[i]).epsilon(1e-6));
}

TEST_CASE("infer_h trace has one entry per iteration and never increases") {
  std::mt19937_64 rng(37);
  const Matrix v = random_matrix(5, 4, rng);
  const Matrix w = random_matrix(5, 2, rng);
  MuConfig cfg = MuConfig::inference();
  cfg.reg = RegParams{1.0, 1.0};
  const FactorizationResult res = infer_h_traced(v, w, cfg);
  CHECK(res.cost_trace.size() <= 100);
  CHECK(res.cost_trace.size() == static_cast<std::size_t>(res.iters_run));
  for (std::size_t i = 1; i < res.cost_trace.size(); ++i)
    CHECK(res.cost_trace[i] <= res.cost_trace[i - 1] + 1e-10 * (1.0 + res.cost_trace[i - 1]));

  // tol = 0 runs the full budget
  cfg.tol = 0.0;
  CHECK(infer_h_traced(v, w, cfg).cost_trace.size() == 100);
}

TEST_CASE("update shape mismatches throw") {
  const Matrix v(4, 3, 1.0);
  const Matrix w(4, 2, 1.0);
  const Matrix h(2, 3, 1.0);
  CHECK_THROWS_AS(update_h(h, w, Matrix(5, 3, 1.0), RegParams{}), DimensionError);
  CHECK_THROWS_AS(update_w(w, Matrix(3, 3, 1.0), v), DimensionError);
  CHECK_THROWS_AS(infer_h(v, Matrix(5, 2, 1.0), MuConfig::inference()), DimensionError);
}
