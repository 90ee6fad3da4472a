#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wbary/projections.hpp"
#include "wbary/rng.hpp"

namespace wbary {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Vector random_vector(Rng& rng, Index n, double scale) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

TEST(ProjectSimplex, Examples) {
  EXPECT_LT((project_simplex(vec({0.3, 0.3, 0.4}), 1.0) - vec({0.3, 0.3, 0.4})).norm(), 1e-15);
  EXPECT_LT((project_simplex(vec({2.0, 0.0}), 1.0) - vec({1.0, 0.0})).norm(), 1e-15);
  EXPECT_LT((project_simplex(vec({0.5, 0.5, 1.5}), 1.0) - vec({0.0, 0.0, 1.0})).norm(), 1e-15);
}

TEST(ProjectSimplex, RejectsBadInput) {
  EXPECT_THROW(project_simplex(vec({1.0}), 0.0), InvalidArgument);
  EXPECT_THROW(project_simplex(vec({1.0}), -1.0), InvalidArgument);
  EXPECT_THROW(project_simplex(vec({std::nan(""), 1.0}), 1.0), InvalidArgument);
}

TEST(ProjectSimplex, MatchesEnumerationOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(10));
    const Vector v = random_vector(rng, n, 2.0);
    const double r = rng.uniform(0.05, 2.0);
    const Vector z = project_simplex(v, r);
    ASSERT_LT((z - oracle::simplex_projection(v, r)).cwiseAbs().maxCoeff(), 1e-10);
    ASSERT_NEAR(z.sum(), r, 1e-12);
    ASSERT_GE(z.minCoeff(), 0.0);
    ASSERT_LT(oracle::simplex_kkt_residual(v, z, r), 1e-10);
  }
}

TEST(ProjectSimplex, Nonexpansive) {
  Rng rng(23);
  for (int trial = 0; trial < 10000; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.below(12));
    const Vector u = random_vector(rng, n, 3.0);
    const Vector v = random_vector(rng, n, 3.0);
    ASSERT_LE((project_simplex(u) - project_simplex(v)).norm(), (u - v).norm() + 1e-14);
  }
}

TEST(ProjectSigma, Examples) {
  const Matrix col = (Matrix(2, 1) << 2.0, 0.0).finished();
  const Matrix z = project_sigma(col, vec({0.5}));
  EXPECT_DOUBLE_EQ(z(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(z(1, 0), 0.0);

  const Matrix inside = (Matrix(2, 2) << 0.1, 0.2, 0.3, 0.4).finished();
  EXPECT_LT((project_sigma(inside, vec({0.4, 0.6})) - inside).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ProjectSigma, ShiftAlongOnesChangesNothing) {
  Rng rng(29);
  Matrix m(4, 3);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-1.0, 1.0);
  const Vector b = vec({0.2, 0.3, 0.5});
  Matrix shifted = m;
  shifted.col(1).array() += 3.7;
  EXPECT_LT((project_sigma(m, b) - project_sigma(shifted, b)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ProjectSigma, ColumnSumsExact) {
  Rng rng(31);
  Matrix m(6, 5);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-2.0, 2.0);
  const Vector b = vec({0.1, 0.15, 0.25, 0.2, 0.3});
  const Matrix z = project_sigma(m, b);
  EXPECT_LT((z.colwise().sum().transpose() - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GE(z.minCoeff(), 0.0);
}

TEST(ProjectSigma, RejectsNonPositiveMass) {
  EXPECT_THROW(project_sigma(Matrix::Zero(2, 2), vec({1.0, 0.0})), InvalidArgument);
}

}  // namespace
}  // namespace wbary
