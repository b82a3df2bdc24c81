#include "dnmf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dnmf {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  std::ostringstream os;
  os << r << "x" << c;
  return os.str();
}

}  // namespace

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    if (row.size() != c)
      throw DimensionError("from_rows: ragged initializer list");
    std::size_t j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

Vector Matrix::column(std::size_t c) const {
  Vector v(rows_);
  for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, c);
  return v;
}

Vector Matrix::row(std::size_t r) const {
  return Vector(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
}

void Matrix::set_column(std::size_t c, const Vector& v) {
  if (v.size() != rows_)
    throw DimensionError("set_column: vector length " + std::to_string(v.size()) +
                         " does not match " + std::to_string(rows_) + " rows");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, c) = v[i];
}

void check_same_shape(const Matrix& a, const Matrix& b, const std::string& where) {
  if (!a.same_shape(b))
    throw DimensionError(where + ": shapes " + shape_str(a.rows(), a.cols()) +
                         " and " + shape_str(b.rows(), b.cols()) + " differ");
}

Matrix hadamard(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "hadamard");
  Matrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("hadamard: vector lengths differ");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Matrix safe_divide(const Matrix& num, const Matrix& den) {
  check_same_shape(num, den, "safe_divide");
  Matrix out(num.rows(), num.cols());
  for (std::size_t i = 0; i < num.size(); ++i)
    out.values()[i] = num.values()[i] / std::max(den.values()[i], kDivEps);
  return out;
}

Vector safe_divide(const Vector& num, const Vector& den) {
  if (num.size() != den.size()) throw DimensionError("safe_divide: vector lengths differ");
  Vector out(num.size());
  for (std::size_t i = 0; i < num.size(); ++i)
    out[i] = num[i] / std::max(den[i], kDivEps);
  return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size())
    throw DimensionError("matvec: " + shape_str(a.rows(), a.cols()) +
                         " times vector of length " + std::to_string(x.size()));
  Vector y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* row = a.data() + i * a.cols();
    double acc = 0.0;
    for (std::size_t l = 0; l < a.cols(); ++l) acc += row[l] * x[l];
    y[i] = acc;
  }
  return y;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: " + shape_str(a.rows(), a.cols()) + " times " +
                         shape_str(b.rows(), b.cols()));
  Matrix c(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.data() + i * c.cols();
    const double* ai = a.data() + i * a.cols();
    for (std::size_t l = 0; l < a.cols(); ++l) {
      const double ail = ai[l];
      if (ail == 0.0) continue;
      const double* bl = b.data() + l * b.cols();
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += ail * bl[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionError("dot: vector lengths differ");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l1_norm(const Vector& v) {
  double acc = 0.0;
  for (double x : v) acc += std::abs(x);
  return acc;
}

double squared_norm(const Vector& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double frobenius_squared(const Matrix& a) {
  double acc = 0.0;
  for (double x : a.values()) acc += x * x;
  return acc;
}

bool all_finite(const Matrix& a) {
  for (double x : a.values())
    if (!std::isfinite(x)) return false;
  return true;
}

bool all_finite(const Vector& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

Matrix gather_columns(const Matrix& a, const std::vector<int>& idx) {
  Matrix out(a.rows(), idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const int c = idx[j];
    if (c < 0 || static_cast<std::size_t>(c) >= a.cols())
      throw DimensionError("gather_columns: index " + std::to_string(c) +
                           " out of range for " + std::to_string(a.cols()) + " columns");
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, static_cast<std::size_t>(c));
  }
  return out;
}

void check_nonneg(const Matrix& a, const std::string& name) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!(a(i, j) >= 0.0))
        throw ConfigError(name + " must be non-negative; entry (" + std::to_string(i) +
                          "," + std::to_string(j) + ") is " + std::to_string(a(i, j)));
}

void check_nonneg(const Vector& v, const std::string& name) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= 0.0))
      throw ConfigError(name + " must be non-negative; entry " + std::to_string(i) +
                        " is " + std::to_string(v[i]));
}

}  // namespace dnmf
