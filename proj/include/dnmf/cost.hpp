#ifndef DNMF_COST_HPP_
#define DNMF_COST_HPP_

#include "dnmf/matrix.hpp"

namespace dnmf {

// L1/L2 penalty weights on the coefficients.
struct RegParams {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

void check_reg(const RegParams& reg);

// 0.5*|v - W h|^2 + lambda1*|h|_1 + 0.5*lambda2*|h|_2^2 for one sample.
double column_cost(const Vector& v, const Matrix& w, const Vector& h, const RegParams& reg);

// Sum of column_cost over the columns of V/H (same summation order).
double matrix_cost(const Matrix& v, const Matrix& w, const Matrix& h, const RegParams& reg);

// Squared error per column divided by the column length, averaged over
// columns. Per-entry normalization is this library's convention; see README.
double mse_columns(const Matrix& x, const Matrix& y);

}  // namespace dnmf

#endif  // DNMF_COST_HPP_
