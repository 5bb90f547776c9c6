#pragma once

#include <cmath>
#include <concepts>
#include <span>

#include "poolnet/dense.hpp"
#include "poolnet/errors.hpp"
#include "poolnet/rng.hpp"

namespace poolnet {

enum class OrthoMode {
  Haar,           ///< rows of a uniformly distributed orthogonal matrix
  StandardBasis,  ///< e_1, ..., e_l (exact 0/1 arithmetic)
};

/// l x d matrix with orthonormal rows, 3 <= l <= d.
///
/// Haar mode takes the Q factor of a Householder QR of a d x l standard
/// Gaussian matrix with the diagonal of R forced positive, which makes the
/// result exactly rotation-invariant in distribution. StandardBasis mode
/// ignores the stream.
Matrix random_orthonormal(int d, int l, RngStream& rng, OrthoMode mode = OrthoMode::Haar);

/// Uniform point on the (d-1)-sphere of radius r.
Vector sample_sphere(int d, double r, RngStream& rng);

/// Uniform point in the closed d-ball of radius r (r >= 0).
Vector sample_ball(int d, double r, RngStream& rng);

/// Central-difference gradient of f at x:
/// g_i = (f(x + h e_i) - f(x - h e_i)) / (2h).
template <typename F>
  requires std::invocable<F&, std::span<const double>>
Vector finite_diff_grad(F&& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw ParameterError("finite_diff_grad: step must be positive");
  Vector probe(x.begin(), x.end());
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(std::span<const double>(probe));
    probe[i] = saved - h;
    const double down = f(std::span<const double>(probe));
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericError("finite_diff_grad: non-finite evaluation at coordinate " +
                         std::to_string(i));
    }
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace poolnet
