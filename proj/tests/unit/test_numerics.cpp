#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "poolnet/dense.hpp"
#include "poolnet/rng.hpp"
#include "poolnet/sampling.hpp"

using namespace poolnet;

TEST(Rng, SameSeedSameSequence) {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsAndSplitsDiffer) {
  RngStream a(42, 0), b(42, 1);
  EXPECT_NE(a.next_u64(), b.next_u64());
  RngStream parent(7);
  const auto before = parent.draws();
  RngStream c1 = parent.split(3), c2 = parent.split(3), c3 = parent.split(4);
  EXPECT_EQ(parent.draws(), before);
  EXPECT_EQ(c1.next_u64(), c2.next_u64());
  EXPECT_NE(c1.next_u64(), c3.next_u64());
}

TEST(Rng, UniformRangesAndMoments) {
  RngStream r(1);
  double sum = 0.0, sq = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / count, 0.0, 0.01);
  EXPECT_NEAR(sq / count, 1.0, 0.02);
  for (int i = 0; i < 1000; ++i) {
    const auto k = r.uniform_index(7);
    ASSERT_LT(k, 7u);
    const int s = r.sign();
    ASSERT_TRUE(s == 1 || s == -1);
  }
}

TEST(Rng, DeriveSeedSeparatesTags) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seen.insert(derive_seed(5, {a, b}));
  }
  EXPECT_EQ(seen.size(), 400u);
  EXPECT_EQ(derive_seed(5, {1, 2}), derive_seed(5, {1, 2}));
}

TEST(Dense, KernelsMatchNaiveLoops) {
  RngStream r(3);
  Matrix a(4, 3), b(3, 5), c(5, 3);
  for (double& v : a.values()) v = r.normal();
  for (double& v : b.values()) v = r.normal();
  for (double& v : c.values()) v = r.normal();
  const Matrix ab = matmul(a, b);
  const Matrix act = matmul_nt(a, c);
  const Matrix atb = matmul_tn(a, matmul(a, b).transposed().transposed());
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      double s = 0.0, t = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        s += a(i, k) * b(k, j);
        t += a(i, k) * c(j, k);
      }
      EXPECT_NEAR(ab(i, j), s, 1e-12);
      EXPECT_NEAR(act(i, j), t, 1e-12);
    }
  }
  EXPECT_EQ(atb.rows(), 3u);
  EXPECT_EQ(atb.cols(), 5u);
  const Vector x{1.0, -2.0, 0.5};
  const Vector ax = matvec(a, x);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(ax[i], dot(a.row(i), x), 1e-12);
  const Matrix g = gram(a);
  EXPECT_NEAR(g(1, 2), dot(a.row(1), a.row(2)), 1e-12);
  EXPECT_THROW(matmul(a, a), DimensionError);
}

TEST(Dense, VectorHelpers) {
  Vector y{1.0, 2.0};
  axpy(2.0, Vector{3.0, -1.0}, y);
  EXPECT_EQ(y, (Vector{7.0, 0.0}));
  EXPECT_DOUBLE_EQ(squared_norm(Vector{3.0, 4.0}), 25.0);
  EXPECT_DOUBLE_EQ(cosine_similarity(Vector{1.0, 0.0}, Vector{2.0, 0.0}), 1.0);
  EXPECT_FALSE(all_finite(Vector{1.0, NAN}));
}

TEST(Sampling, SphereAndBall) {
  RngStream r(9);
  for (int i = 0; i < 200; ++i) {
    EXPECT_NEAR(norm(sample_sphere(7, 2.5, r)), 2.5, 1e-12);
    EXPECT_LE(norm(sample_ball(7, 0.3, r)), 0.3 + 1e-15);
  }
  EXPECT_THROW(sample_sphere(3, 0.0, r), ParameterError);
}

TEST(Sampling, BallRadiusDistribution) {
  // P(|v| <= r/2) = 2^{-d} for the uniform ball.
  RngStream r(11);
  int inside = 0;
  const int count = 40000;
  for (int i = 0; i < count; ++i) inside += norm(sample_ball(3, 1.0, r)) <= 0.5;
  EXPECT_NEAR(static_cast<double>(inside) / count, 0.125, 0.01);
}

TEST(Sampling, OrthonormalRows) {
  RngStream r(5);
  for (int d : {3, 6, 20}) {
    const Matrix q = random_orthonormal(d, d, r);
    const Matrix g = gram(q);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) EXPECT_NEAR(g(i, j), i == j ? 1.0 : 0.0, 1e-12);
    }
  }
  const Matrix e = random_orthonormal(5, 3, r, OrthoMode::StandardBasis);
  EXPECT_EQ(e(0, 0), 1.0);
  EXPECT_EQ(e(2, 2), 1.0);
  EXPECT_EQ(e(1, 0), 0.0);
  EXPECT_THROW(random_orthonormal(3, 4, r), DimensionError);
}

TEST(Sampling, HaarFirstCoordinateIsUnbiased) {
  // For a uniformly random unit vector in R^d, E[u_1^2] = 1/d.
  RngStream r(21);
  const int d = 4, count = 20000;
  double acc = 0.0;
  for (int i = 0; i < count; ++i) {
    const Matrix q = random_orthonormal(d, 3, r);
    acc += q(0, 0) * q(0, 0);
  }
  EXPECT_NEAR(acc / count, 1.0 / d, 0.01);
}

TEST(Sampling, FiniteDifferenceOnQuadratic) {
  auto f = [](std::span<const double> x) { return x[0] * x[0] + 3.0 * x[0] * x[1]; };
  const Vector g = finite_diff_grad(f, Vector{1.0, 2.0}, 1e-5);
  EXPECT_NEAR(g[0], 8.0, 1e-8);
  EXPECT_NEAR(g[1], 3.0, 1e-8);
}
