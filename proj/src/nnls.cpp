#include "dnmf/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace dnmf {

namespace {

// Cholesky factorization of a symmetric positive definite matrix, in place.
// Returns false on a non-positive pivot.
bool cholesky(Matrix& a) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t l = 0; l < j; ++l) d -= a(j, l) * a(j, l);
    if (!(d > 0.0)) return false;
    const double root = std::sqrt(d);
    a(j, j) = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t l = 0; l < j; ++l) s -= a(i, l) * a(j, l);
      a(i, j) = s / root;
    }
  }
  return true;
}

Vector cholesky_solve(const Matrix& chol, const Vector& rhs) {
  const std::size_t n = chol.rows();
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t l = 0; l < i; ++l) s -= chol(i, l) * y[l];
    y[i] = s / chol(i, i);
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t l = i + 1; l < n; ++l) s -= chol(l, i) * x[l];
    x[i] = s / chol(i, i);
  }
  return x;
}

// Least squares restricted to the passive columns, via the normal equations
// with the precomputed Gram matrix, then two refinement sweeps through M to
// recover the accuracy the squared condition number costs.
Vector solve_passive(const Matrix& m, const Vector& b, const Matrix& gram,
                     const Vector& mtb, const std::vector<int>& passive) {
  const std::size_t q = passive.size();
  Matrix sub(q, q);
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = 0; j < q; ++j)
      sub(i, j) = gram(static_cast<std::size_t>(passive[i]), static_cast<std::size_t>(passive[j]));
  Matrix chol = sub;
  if (!cholesky(chol)) {
    double ridge = 0.0;
    for (std::size_t i = 0; i < q; ++i) ridge = std::max(ridge, sub(i, i));
    ridge = std::max(ridge, 1.0) * 1e-12;
    chol = sub;
    for (std::size_t i = 0; i < q; ++i) chol(i, i) += ridge;
    if (!cholesky(chol))
      throw NumericError("nnls: passive-set normal equations are singular");
  }

  Vector rhs(q);
  for (std::size_t i = 0; i < q; ++i) rhs[i] = mtb[static_cast<std::size_t>(passive[i])];
  Vector z = cholesky_solve(chol, rhs);

  for (int sweep = 0; sweep < 2; ++sweep) {
    Vector r = b;  // r = b - M_P z
    for (std::size_t i = 0; i < m.rows(); ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < q; ++j)
        acc += m(i, static_cast<std::size_t>(passive[j])) * z[j];
      r[i] -= acc;
    }
    Vector g(q, 0.0);  // M_P' r
    for (std::size_t j = 0; j < q; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < m.rows(); ++i)
        acc += m(i, static_cast<std::size_t>(passive[j])) * r[i];
      g[j] = acc;
    }
    const Vector dz = cholesky_solve(chol, g);
    for (std::size_t j = 0; j < q; ++j) z[j] += dz[j];
  }
  return z;
}

}  // namespace

Vector nnls_vector(const Matrix& m, const Vector& b, const NnlsConfig& cfg) {
  const std::size_t rows = m.rows();
  const std::size_t p = m.cols();
  if (rows == 0 || p == 0) throw DimensionError("nnls_vector: empty problem");
  if (b.size() != rows)
    throw DimensionError("nnls_vector: b has length " + std::to_string(b.size()) +
                         " but M has " + std::to_string(rows) + " rows");
  if (!(cfg.tol > 0.0)) throw ConfigError("nnls tol must be > 0");
  const int budget = cfg.max_iters > 0 ? cfg.max_iters : 3 * static_cast<int>(p);

  const Matrix mt = transpose(m);
  const Matrix gram = matmul(mt, m);
  const Vector mtb = matvec(mt, b);

  // The KKT test is relative to the gradient scale of the problem; an
  // absolute threshold stalls the active set on large counts with nearly
  // collinear columns.
  double scale = 1.0;
  for (double x : mtb) scale = std::max(scale, std::abs(x));
  const double tol_eff = cfg.tol * scale;

  Vector x(p, 0.0);
  std::vector<char> in_passive(p, 0);
  std::vector<int> passive;

  for (int pass = 0;; ++pass) {
    // w = M'(b - Mx); optimal when w <= tol on the free set.
    Vector w = mtb;
    const Vector mx = matvec(m, x);
    const Vector correction = matvec(mt, mx);
    for (std::size_t i = 0; i < p; ++i) w[i] -= correction[i];

    int t = -1;
    double wmax = tol_eff;
    for (std::size_t i = 0; i < p; ++i) {
      if (!in_passive[i] && w[i] > wmax) {
        wmax = w[i];
        t = static_cast<int>(i);
      }
    }
    if (t < 0) return x;

    if (pass >= budget)
      throw IterationLimitError("nnls: active set did not settle within " +
                                    std::to_string(budget) + " passes",
                                x);

    in_passive[static_cast<std::size_t>(t)] = 1;
    passive.push_back(t);

    Vector z = solve_passive(m, b, gram, mtb, passive);
    while (true) {
      // Step toward z only as far as feasibility allows; the blocking index
      // leaves the passive set at exactly zero.
      double alpha = std::numeric_limits<double>::infinity();
      int blocking = -1;
      for (std::size_t j = 0; j < passive.size(); ++j) {
        if (z[j] <= 0.0) {
          const double xj = x[static_cast<std::size_t>(passive[j])];
          const double step = xj / (xj - z[j]);
          if (step < alpha) {
            alpha = step;
            blocking = passive[j];
          }
        }
      }
      if (blocking < 0) break;
      for (std::size_t j = 0; j < passive.size(); ++j) {
        const std::size_t idx = static_cast<std::size_t>(passive[j]);
        x[idx] += alpha * (z[j] - x[idx]);
      }
      x[static_cast<std::size_t>(blocking)] = 0.0;
      std::vector<int> kept;
      for (int idx : passive) {
        const std::size_t u = static_cast<std::size_t>(idx);
        if (idx == blocking || x[u] <= 0.0) {
          x[u] = 0.0;
          in_passive[u] = 0;
        } else {
          kept.push_back(idx);
        }
      }
      passive = std::move(kept);
      if (passive.empty()) break;
      z = solve_passive(m, b, gram, mtb, passive);
    }
    for (std::size_t i = 0; i < p; ++i) x[i] = 0.0;
    for (std::size_t j = 0; j < passive.size(); ++j)
      x[static_cast<std::size_t>(passive[j])] = z[j];
  }
}

Matrix estimate_w(const Matrix& v, const Matrix& h, const NnlsConfig& cfg) {
  if (h.cols() != v.cols())
    throw DimensionError("estimate_w: H has " + std::to_string(h.cols()) +
                         " columns but V has " + std::to_string(v.cols()));
  for (std::size_t r = 0; r < h.rows(); ++r) {
    bool all_zero = true;
    for (std::size_t j = 0; j < h.cols(); ++j)
      if (h(r, j) != 0.0) { all_zero = false; break; }
    if (all_zero)
      throw DegenerateDictionaryError(
          "estimate_w: H row " + std::to_string(r) +
              " is all zeros; that factor's coefficient is unidentifiable",
          r);
  }
  const Matrix ht = transpose(h);
  Matrix w(v.rows(), h.rows());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    const Vector x = nnls_vector(ht, v.row(i), cfg);
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) = x[j];
  }
  return w;
}

}  // namespace dnmf
