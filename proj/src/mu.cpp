#include "dnmf/mu.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace dnmf {

namespace {

void check_mu_config(const MuConfig& cfg) {
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(cfg.tol >= 0.0)) throw ConfigError("tol must be >= 0");
  if (!(cfg.init_value > 0.0)) throw ConfigError("init_value must be > 0");
  if (cfg.restarts < 1) throw ConfigError("restarts must be >= 1");
  check_reg(cfg.reg);
}

Matrix init_matrix(std::size_t rows, std::size_t cols, const MuConfig& cfg,
                   std::uint64_t seed) {
  if (cfg.init == InitKind::kFixed) return Matrix(rows, cols, cfg.init_value);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix m(rows, cols);
  for (double& x : m.values()) x = 1.0 - unit(rng);  // uniform (0,1]
  return m;
}

// Stop once the relative decrease falls below tol.
bool converged(double prev, double cur, double tol) {
  return std::abs(prev - cur) <= tol * std::max(std::abs(prev), 1e-300);
}

void add_reg_inplace(Matrix& denom, const Matrix& h, const RegParams& reg) {
  for (std::size_t i = 0; i < denom.size(); ++i)
    denom.values()[i] += reg.lambda1 + reg.lambda2 * h.values()[i];
}

}  // namespace

Matrix update_h(const Matrix& h, const Matrix& w, const Matrix& v, const RegParams& reg) {
  check_reg(reg);
  if (w.rows() != v.rows() || w.cols() != h.rows() || h.cols() != v.cols())
    throw DimensionError("update_h: V " + std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()) + ", W " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", H " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()));
  check_nonneg(h, "H");
  check_nonneg(w, "W");
  check_nonneg(v, "V");
  const Matrix wt = transpose(w);
  const Matrix numer = matmul(wt, v);
  Matrix denom = matmul(matmul(wt, w), h);
  add_reg_inplace(denom, h, reg);
  return hadamard(h, safe_divide(numer, denom));
}

Matrix update_w(const Matrix& w, const Matrix& h, const Matrix& v) {
  if (w.rows() != v.rows() || w.cols() != h.rows() || h.cols() != v.cols())
    throw DimensionError("update_w: V " + std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()) + ", W " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", H " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()));
  check_nonneg(h, "H");
  check_nonneg(w, "W");
  check_nonneg(v, "V");
  const Matrix ht = transpose(h);
  const Matrix numer = matmul(v, ht);
  const Matrix denom = matmul(w, matmul(h, ht));
  return hadamard(w, safe_divide(numer, denom));
}

FactorizationResult factorize(const Matrix& v, std::size_t k, const MuConfig& cfg) {
  check_mu_config(cfg);
  check_nonneg(v, "V");
  if (k < 1 || k > std::min(v.rows(), v.cols()))
    throw ConfigError("k=" + std::to_string(k) + " must be in [1, min(f,n)] for a " +
                      std::to_string(v.rows()) + "x" + std::to_string(v.cols()) + " matrix");

  FactorizationResult best;
  double best_cost = 0.0;
  for (int r = 0; r < cfg.restarts; ++r) {
    FactorizationResult res;
    res.w = init_matrix(v.rows(), k, cfg, cfg.seed + static_cast<std::uint64_t>(r));
    res.h = init_matrix(k, v.cols(), cfg, cfg.seed + static_cast<std::uint64_t>(r) + 0x9e3779b97f4a7c15ull);
    double prev = matrix_cost(v, res.w, res.h, cfg.reg);
    for (int it = 0; it < cfg.max_iters; ++it) {
      res.h = update_h(res.h, res.w, v, cfg.reg);
      res.w = update_w(res.w, res.h, v);
      const double cost = matrix_cost(v, res.w, res.h, cfg.reg);
      res.cost_trace.push_back(cost);
      ++res.iters_run;
      if (converged(prev, cost, cfg.tol)) break;
      prev = cost;
    }
    const double final_cost = res.cost_trace.back();
    if (r == 0 || final_cost < best_cost) {
      best_cost = final_cost;
      best = std::move(res);
    }
  }
  return best;
}

FactorizationResult infer_h_traced(const Matrix& v, const Matrix& w, const MuConfig& cfg) {
  check_mu_config(cfg);
  check_nonneg(w, "W");
  check_nonneg(v, "V");
  if (w.rows() != v.rows())
    throw DimensionError("infer_h: W has " + std::to_string(w.rows()) +
                         " rows but V has " + std::to_string(v.rows()));
  FactorizationResult res;
  res.w = w;
  res.h = init_matrix(w.cols(), v.cols(), cfg, cfg.seed);
  double prev = matrix_cost(v, w, res.h, cfg.reg);
  for (int it = 0; it < cfg.max_iters; ++it) {
    res.h = update_h(res.h, w, v, cfg.reg);
    const double cost = matrix_cost(v, w, res.h, cfg.reg);
    res.cost_trace.push_back(cost);
    ++res.iters_run;
    if (converged(prev, cost, cfg.tol)) break;
    prev = cost;
  }
  return res;
}

Matrix infer_h(const Matrix& v, const Matrix& w, const MuConfig& cfg) {
  if (cfg.tol > 0.0) return infer_h_traced(v, w, cfg).h;
  // tol == 0 never stops early, so the per-iteration cost is not needed.
  check_mu_config(cfg);
  check_nonneg(w, "W");
  check_nonneg(v, "V");
  if (w.rows() != v.rows())
    throw DimensionError("infer_h: W has " + std::to_string(w.rows()) +
                         " rows but V has " + std::to_string(v.rows()));
  Matrix h = init_matrix(w.cols(), v.cols(), cfg, cfg.seed);
  for (int it = 0; it < cfg.max_iters; ++it) h = update_h(h, w, v, cfg.reg);
  return h;
}

}  // namespace dnmf
