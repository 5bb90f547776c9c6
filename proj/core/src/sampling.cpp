#include "poolnet/sampling.hpp"

#include <string>

namespace poolnet {

Matrix random_orthonormal(int d, int l, RngStream& rng, OrthoMode mode) {
  if (l < 3 || l > d) {
    throw DimensionError("random_orthonormal: need 3 <= l <= d, got l=" + std::to_string(l) +
                         " d=" + std::to_string(d));
  }
  const auto rows = static_cast<std::size_t>(d);
  const auto cols = static_cast<std::size_t>(l);

  if (mode == OrthoMode::StandardBasis) {
    Matrix basis(cols, rows);
    for (std::size_t i = 0; i < cols; ++i) basis(i, i) = 1.0;
    return basis;
  }

  Matrix a(rows, cols);
  for (double& v : a.values()) v = rng.normal();

  // Householder QR in place; reflector j is stored in reflectors.row(j)[j..].
  Matrix reflectors(cols, rows);
  Vector r_diag(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double col_norm2 = 0.0;
    for (std::size_t i = j; i < rows; ++i) col_norm2 += a(i, j) * a(i, j);
    const double col_norm = std::sqrt(col_norm2);
    const double alpha = a(j, j) > 0.0 ? -col_norm : col_norm;
    r_diag[j] = alpha;

    auto v = reflectors.row(j);
    for (std::size_t i = j; i < rows; ++i) v[i] = a(i, j);
    v[j] -= alpha;
    double v_norm2 = 0.0;
    for (std::size_t i = j; i < rows; ++i) v_norm2 += v[i] * v[i];
    if (v_norm2 == 0.0) continue;  // column already reduced
    const double inv = 1.0 / std::sqrt(v_norm2);
    for (std::size_t i = j; i < rows; ++i) v[i] *= inv;

    for (std::size_t c = j; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t i = j; i < rows; ++i) s += v[i] * a(i, c);
      for (std::size_t i = j; i < rows; ++i) a(i, c) -= 2.0 * s * v[i];
    }
  }

  // Q[:, :l] = H_0 ... H_{l-1} applied to the first l unit vectors.
  Matrix q(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) q(j, j) = 1.0;
  for (std::size_t jj = cols; jj-- > 0;) {
    auto v = reflectors.row(jj);
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t i = jj; i < rows; ++i) s += v[i] * q(i, c);
      for (std::size_t i = jj; i < rows; ++i) q(i, c) -= 2.0 * s * v[i];
    }
  }

  Matrix out(cols, rows);
  for (std::size_t j = 0; j < cols; ++j) {
    const double sign = r_diag[j] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < rows; ++i) out(j, i) = sign * q(i, j);
  }
  return out;
}

Vector sample_sphere(int d, double r, RngStream& rng) {
  if (!(r > 0.0)) throw ParameterError("sample_sphere: radius must be positive");
  if (d < 1) throw DimensionError("sample_sphere: dimension must be >= 1");
  Vector v(static_cast<std::size_t>(d));
  double n2 = 0.0;
  while (n2 == 0.0) {
    for (double& x : v) x = rng.normal();
    n2 = squared_norm(v);
  }
  scale(r / std::sqrt(n2), v);
  return v;
}

Vector sample_ball(int d, double r, RngStream& rng) {
  if (!(r >= 0.0)) throw ParameterError("sample_ball: radius must be non-negative");
  if (r == 0.0) return Vector(static_cast<std::size_t>(d), 0.0);
  Vector v = sample_sphere(d, 1.0, rng);
  const double radius = r * std::pow(rng.uniform(), 1.0 / d);
  scale(radius, v);
  return v;
}

}  // namespace poolnet
