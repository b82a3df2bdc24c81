#ifndef DNMF_MATRIX_HPP_
#define DNMF_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "dnmf/errors.hpp"

namespace dnmf {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. All factorization code works on these;
// non-negativity is checked at the entry points that require it rather than
// being baked into the type, so the same type can hold gradients.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  Vector column(std::size_t c) const;
  Vector row(std::size_t r) const;
  void set_column(std::size_t c, const Vector& v);

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Denominators below this are clamped before dividing, preserving positive
// iterates in the multiplicative updates.
inline constexpr double kDivEps = 1e-12;

// Elementwise kernels. Shape mismatches throw DimensionError.
Matrix hadamard(const Matrix& a, const Matrix& b);
Vector hadamard(const Vector& a, const Vector& b);
Matrix safe_divide(const Matrix& num, const Matrix& den);
Vector safe_divide(const Vector& num, const Vector& den);
Vector matvec(const Matrix& a, const Vector& x);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

double dot(const Vector& a, const Vector& b);
double l1_norm(const Vector& v);
double squared_norm(const Vector& v);
double frobenius_squared(const Matrix& a);
bool all_finite(const Matrix& a);
bool all_finite(const Vector& v);

// New matrix holding the listed columns of `a`, in order.
Matrix gather_columns(const Matrix& a, const std::vector<int>& idx);

// Validation helpers; `name` appears in the thrown message.
void check_nonneg(const Matrix& a, const std::string& name);
void check_nonneg(const Vector& v, const std::string& name);
void check_same_shape(const Matrix& a, const Matrix& b, const std::string& where);

}  // namespace dnmf

#endif  // DNMF_MATRIX_HPP_
