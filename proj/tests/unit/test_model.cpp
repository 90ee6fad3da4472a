#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "wbary/model.hpp"
#include "wbary/rng.hpp"

namespace wbary {
namespace {

DiscreteDistribution point_set(std::initializer_list<double> pts, std::initializer_list<double> b) {
  Matrix a(static_cast<Index>(pts.size()), 1);
  Index i = 0;
  for (double p : pts) a(i++, 0) = p;
  Vector w(static_cast<Index>(b.size()));
  i = 0;
  for (double v : b) w[i++] = v;
  return DiscreteDistribution(a, w);
}

TEST(Distribution, RejectsBadWeights) {
  Matrix a = Matrix::Zero(2, 1);
  EXPECT_THROW(DiscreteDistribution(a, Vector::Constant(2, 0.4)), InvalidArgument);
  EXPECT_THROW(DiscreteDistribution(a, (Vector(2) << 1.5, -0.5).finished()), InvalidArgument);
  EXPECT_THROW(DiscreteDistribution(Matrix::Zero(3, 1), Vector::Constant(2, 0.5)), InvalidArgument);
}

TEST(Distribution, RenormalizesWithinTolerance) {
  const auto p = point_set({0.0, 1.0}, {0.5 + 4e-13, 0.5});
  EXPECT_NEAR(p.weights().sum(), 1.0, 1e-15);
}

TEST(Distribution, DropsZeroWeights) {
  const auto p = point_set({0.0, 1.0, 2.0}, {0.5, 0.0, 0.5});
  ASSERT_EQ(p.size(), 2);
  EXPECT_EQ(p.support()(1, 0), 2.0);
}

TEST(Distribution, FromMassesNormalizes) {
  const auto p = DiscreteDistribution::from_masses(Matrix::Zero(3, 2), Vector::Constant(3, 2.0));
  EXPECT_NEAR(p.weights()[0], 1.0 / 3.0, 1e-16);
}

TEST(Problem, RejectsMixedDimensions) {
  std::vector<DiscreteDistribution> data{
      DiscreteDistribution(Matrix::Zero(1, 1), Vector::Ones(1)),
      DiscreteDistribution(Matrix::Zero(1, 2), Vector::Ones(1))};
  EXPECT_THROW(BarycenterProblem(data, 2), InvalidArgument);
  EXPECT_THROW(BarycenterProblem({}, 2), InvalidArgument);
  EXPECT_THROW(BarycenterProblem({data[0]}, 0), InvalidArgument);
}

TEST(CostMatrix, HandValues) {
  const auto p0 = point_set({0.0}, {1.0});
  EXPECT_EQ(cost_matrix(Matrix::Zero(1, 1), p0)(0, 0), 0.0);

  const auto p2 = point_set({2.0}, {1.0});
  const Matrix x = (Matrix(2, 1) << 0.0, 1.0).finished();
  const Matrix f = cost_matrix(x, p2);
  EXPECT_EQ(f(0, 0), 4.0);
  EXPECT_EQ(f(1, 0), 1.0);
}

TEST(CostMatrix, DimensionMismatchThrows) {
  const auto p = point_set({0.0}, {1.0});
  EXPECT_THROW(cost_matrix(Matrix::Zero(2, 3), p), InvalidArgument);
}

TEST(CostMatrix, RowPermutationAndExpansion) {
  Rng rng(5);
  const auto p = fixture::random_distribution(rng, 6, 3);
  Matrix x(4, 3);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform(-1.0, 1.0);
  const Matrix f = cost_matrix(x, p);
  Matrix xp = x;
  xp.row(0).swap(xp.row(3));
  Matrix fp = cost_matrix(xp, p);
  fp.row(0).swap(fp.row(3));
  EXPECT_EQ((f - fp).cwiseAbs().maxCoeff(), 0.0);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < p.size(); ++j) {
      const double expanded = x.row(i).squaredNorm() - 2.0 * x.row(i).dot(p.support().row(j)) +
                              p.support().row(j).squaredNorm();
      EXPECT_NEAR(f(i, j), expanded, 1e-12);
      EXPECT_GE(f(i, j), 0.0);
    }
  }
}

TEST(Objective, HandValuesAndLinearity) {
  BarycenterProblem problem({point_set({2.0}, {1.0})}, 1);
  BarycenterState s{{Matrix::Ones(1, 1)}, Vector::Ones(1), Matrix::Zero(1, 1)};
  EXPECT_DOUBLE_EQ(objective(s, problem), 4.0);
  s.plans[0] *= 0.25;
  EXPECT_DOUBLE_EQ(objective(s, problem), 1.0);
  s.plans[0].setZero();
  EXPECT_EQ(objective(s, problem), 0.0);
}

TEST(Objective, InvariantUnderJointPermutation) {
  const auto data = fixture::random_data(9, 3, 4, 2);
  BarycenterProblem problem(data, 3);
  Rng rng(1);
  BarycenterState s;
  s.w = Vector::Constant(3, 1.0 / 3.0);
  s.x = Matrix::Random(3, 2);
  for (const auto& p : data) {
    Matrix z(3, p.size());
    for (Index k = 0; k < z.size(); ++k) z.data()[k] = rng.uniform();
    s.plans.push_back(z);
  }
  const double before = objective(s, problem);
  s.x.row(0).swap(s.x.row(2));
  for (auto& z : s.plans) z.row(0).swap(z.row(2));
  EXPECT_NEAR(objective(s, problem), before, 1e-14);
}

TEST(Pinfeas, HandValue) {
  BarycenterProblem problem({point_set({0.0}, {1.0})}, 1);
  BarycenterState s{{Matrix::Ones(1, 1)}, Vector::Constant(1, 0.5), Matrix::Zero(1, 1)};
  EXPECT_DOUBLE_EQ(pinfeas(s, problem), 0.25);
  s.w[0] = 1.0;
  EXPECT_EQ(pinfeas(s, problem), 0.0);
}

TEST(Pinfeas, DuplicatingADistributionKeepsTheMax) {
  const auto p = point_set({0.0, 1.0}, {0.3, 0.7});
  const Matrix z = (Matrix(2, 2) << 0.3, 0.1, 0.0, 0.6).finished();
  const Vector w = (Vector(2) << 0.5, 0.5).finished();
  const double one = pinfeas({z}, w, 1.0);
  EXPECT_DOUBLE_EQ(pinfeas({z, z}, w, 1.0), one);
}

TEST(EvaluateObjval, HandValues) {
  const auto p = point_set({0.0, 2.0}, {0.5, 0.5});
  BarycenterProblem problem({p}, 2);
  const Vector w = (Vector(2) << 0.5, 0.5).finished();
  const Matrix x = (Matrix(2, 1) << 0.0, 1.0).finished();
  EXPECT_NEAR(evaluate_objval(w, x, problem), 0.5, 1e-12);
  EXPECT_NEAR(evaluate_objval(w, p.support(), problem), 0.0, 1e-14);
  BarycenterProblem tripled({p, p, p}, 2);
  EXPECT_NEAR(evaluate_objval(w, x, tripled), 0.5, 1e-12);
}

TEST(EvaluateObjval, NeverAboveFeasibleStateObjective) {
  const auto data = fixture::random_data(21, 4, 5, 2);
  BarycenterProblem problem(data, 3);
  Rng rng(2);
  const Vector w = (Vector(3) << 0.2, 0.3, 0.5).finished();
  BarycenterState s;
  s.w = w;
  s.x = Matrix::Random(3, 2);
  // Product couplings are feasible: Z e = w, Z^T e = b.
  for (const auto& p : data) s.plans.push_back(w * p.weights().transpose());
  ASSERT_LT(pinfeas(s, problem), 1e-15);
  EXPECT_LE(evaluate_objval(s.w, s.x, problem), objective(s, problem) + 1e-9);
}

}  // namespace
}  // namespace wbary
