#include "dnmf/cost.hpp"

#include <cmath>
#include <string>

namespace dnmf {

void check_reg(const RegParams& reg) {
  if (!(reg.lambda1 >= 0.0) || !(reg.lambda2 >= 0.0))
    throw ConfigError("regularization weights must be non-negative, got lambda1=" +
                      std::to_string(reg.lambda1) + " lambda2=" + std::to_string(reg.lambda2));
}

double column_cost(const Vector& v, const Matrix& w, const Vector& h, const RegParams& reg) {
  check_reg(reg);
  if (w.rows() != v.size() || w.cols() != h.size())
    throw DimensionError("column_cost: W is " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + " but v has length " +
                         std::to_string(v.size()) + " and h length " +
                         std::to_string(h.size()));
  const Vector wh = matvec(w, h);
  double resid = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] - wh[i];
    resid += d * d;
  }
  return 0.5 * resid + reg.lambda1 * l1_norm(h) + 0.5 * reg.lambda2 * squared_norm(h);
}

double matrix_cost(const Matrix& v, const Matrix& w, const Matrix& h, const RegParams& reg) {
  check_reg(reg);
  if (w.rows() != v.rows() || w.cols() != h.rows() || h.cols() != v.cols())
    throw DimensionError("matrix_cost: V " + std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()) + ", W " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", H " + std::to_string(h.rows()) + "x" +
                         std::to_string(h.cols()));
  double total = 0.0;
  for (std::size_t j = 0; j < v.cols(); ++j)
    total += column_cost(v.column(j), w, h.column(j), reg);
  return total;
}

double mse_columns(const Matrix& x, const Matrix& y) {
  check_same_shape(x, y, "mse_columns");
  if (x.rows() == 0 || x.cols() == 0)
    throw DimensionError("mse_columns: empty matrix");
  double mean = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double d = x(i, j) - y(i, j);
      col += d * d;
    }
    mean += col / static_cast<double>(x.rows());
  }
  return mean / static_cast<double>(x.cols());
}

}  // namespace dnmf
