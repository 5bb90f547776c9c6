#include "poolnet/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poolnet/errors.hpp"

namespace poolnet {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_same_size(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": length " + std::to_string(a) + " vs " +
                         std::to_string(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("Matrix: " + std::to_string(data_.size()) + " values for shape " +
                         shape(rows, cols));
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(squared_norm(a)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require_same_size(x.size(), y.size(), "axpy");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw NumericError("cosine_similarity: zero vector");
  return dot(a, b) / (na * nb);
}

bool all_finite(std::span<const double> a) {
  return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

// The ikj loop order keeps each output entry's accumulation in a fixed order
// while letting the innermost loop vectorize over contiguous columns.
Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + shape(a.rows(), a.cols()) + " * " +
                         shape(b.rows(), b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.data() + i * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* brow = b.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: " + shape(a.rows(), a.cols()) + " * (" +
                         shape(b.rows(), b.cols()) + ")^T");
  }
  return matmul(a, b.transposed());
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: (" + shape(a.rows(), a.cols()) + ")^T * " +
                         shape(b.rows(), b.cols()));
  }
  Matrix c(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t s = 0; s < a.rows(); ++s) {
    const double* brow = b.data() + s * n;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double asi = a(s, i);
      if (asi == 0.0) continue;
      double* out = c.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) out[j] += asi * brow[j];
    }
  }
  return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
  require_same_size(a.cols(), x.size(), "matvec");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
  return y;
}

Vector matvec_t(const Matrix& a, std::span<const double> x) {
  require_same_size(a.rows(), x.size(), "matvec_t");
  Vector y(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
  return y;
}

Matrix gram(const Matrix& a) { return matmul_nt(a, a); }

}  // namespace poolnet
