#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace poolnet {

using Vector = std::vector<double>;

/// Row-major dense matrix of doubles. Shapes are fixed at construction and
/// every free-function kernel below checks them.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double norm(std::span<const double> a);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
/// max_i |a_i - b_i|
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double cosine_similarity(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> a);

/// A * B
Matrix matmul(const Matrix& a, const Matrix& b);
/// A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);
/// A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A * x
Vector matvec(const Matrix& a, std::span<const double> x);
/// A^T * x
Vector matvec_t(const Matrix& a, std::span<const double> x);
/// A * A^T
Matrix gram(const Matrix& a);

}  // namespace poolnet
