#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wbary/pam.hpp"
#include "wbary/rng.hpp"

namespace wbary {
namespace {

DiscreteDistribution line_points(std::initializer_list<double> pts, std::initializer_list<double> b) {
  Matrix a(static_cast<Index>(pts.size()), 1);
  Vector w(static_cast<Index>(b.size()));
  Index i = 0;
  for (double p : pts) a(i++, 0) = p;
  i = 0;
  for (double v : b) w[i++] = v;
  return DiscreteDistribution(a, w);
}

TEST(InitState, HandExample) {
  BarycenterProblem problem({line_points({0.0, 1.0}, {0.3, 0.7})}, 2);
  const BarycenterState s = init_state(problem, 0);
  const Matrix expected = (Matrix(2, 2) << 0.15, 0.35, 0.15, 0.35).finished();
  EXPECT_LT((s.plans[0] - expected).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_EQ(s.w, Vector::Constant(2, 0.5));
  // Both distinct support points are used.
  EXPECT_NE(s.x(0, 0), s.x(1, 0));
}

TEST(InitState, FeasibleAndDeterministic) {
  const auto data = fixture::example_data(3, 6, 2, 7);
  BarycenterProblem problem(data, 5);
  const BarycenterState a = init_state(problem, 17);
  const BarycenterState b = init_state(problem, 17);
  EXPECT_EQ(a.x, b.x);
  EXPECT_LT(pinfeas(a, problem), 1e-15);
  for (std::size_t t = 0; t < data.size(); ++t) {
    EXPECT_LT((a.plans[t].colwise().sum().transpose() - data[t].weights()).cwiseAbs().maxCoeff(),
              1e-15);
  }
  EXPECT_NE(init_state(problem, 18).x, a.x);
}

TEST(InitState, FewerDistinctPointsThanM) {
  BarycenterProblem problem({line_points({1.0}, {1.0}), line_points({1.0}, {1.0})}, 3);
  const BarycenterState s = init_state(problem, 0);
  EXPECT_EQ(s.x, Matrix::Constant(3, 1, 1.0));
}

TEST(XUpdate, HandExamples) {
  BarycenterProblem problem({line_points({2.0}, {1.0})}, 1);
  const std::vector<Matrix> plans{Matrix::Ones(1, 1)};
  EXPECT_DOUBLE_EQ(x_update(plans, Matrix::Zero(1, 1), 0.0, problem)(0, 0), 2.0);
  EXPECT_NEAR(x_update(plans, Matrix::Zero(1, 1), 1.0, problem)(0, 0), 4.0 / 3.0, 1e-15);
}

TEST(XUpdate, MasslessRowKeepsPrevious) {
  BarycenterProblem problem({line_points({2.0}, {1.0})}, 2);
  const std::vector<Matrix> plans{(Matrix(2, 1) << 1.0, 0.0).finished()};
  const Matrix prev = (Matrix(2, 1) << 0.0, -3.0).finished();
  EXPECT_EQ(x_update(plans, prev, 1.0, problem)(1, 0), -3.0);
  EXPECT_EQ(x_update(plans, prev, 0.0, problem)(1, 0), -3.0);
}

TEST(XUpdate, GradientVanishesAtMinimizer) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = fixture::random_data(300 + trial, 3, 4, 2, 3.0);
    BarycenterProblem problem(data, 3);
    std::vector<Matrix> plans;
    for (const auto& p : data) {
      Matrix z(3, p.size());
      for (Index k = 0; k < z.size(); ++k) z.data()[k] = rng.uniform();
      plans.push_back(z);
    }
    Matrix prev(3, 2);
    for (Index k = 0; k < prev.size(); ++k) prev.data()[k] = rng.uniform(0.0, 3.0);
    const double rho = 1e-5;
    const Matrix x = x_update(plans, prev, rho, problem);
    auto f = [&](const Vector& flat) {
      const Matrix xm = Eigen::Map<const Matrix>(flat.data(), 3, 2);
      double v = 0.0;
      for (std::size_t t = 0; t < data.size(); ++t) {
        v += plans[t].cwiseProduct(cost_matrix(xm, data[t])).sum();
      }
      return v / static_cast<double>(data.size()) + 0.5 * rho * (xm - prev).squaredNorm();
    };
    const Vector flat = Eigen::Map<const Vector>(x.data(), x.size());
    ASSERT_LE(oracle::fd_gradient(f, flat, 1e-6).cwiseAbs().maxCoeff(), 1e-6);
  }
}

TEST(Schedules, Examples) {
  const PamConfig config;
  const Schedule s = update_schedules(1.0, 1.0, 100.0, 5e-2, config);
  EXPECT_DOUBLE_EQ(s.eps, 4e-2);
  EXPECT_DOUBLE_EQ(s.alpha, 10.0);
  EXPECT_DOUBLE_EQ(update_schedules(1.0, 1.0, 1e-8, 5e-2, config).alpha, 1e-8);
  // Energy below the threshold keeps alpha.
  EXPECT_DOUBLE_EQ(update_schedules(1e-9, 1.0, 100.0, 5e-2, config).alpha, 100.0);
  EXPECT_DOUBLE_EQ(update_schedules(0.0, 1.0, 1.0, 1e-5, config).eps, 1e-5);
}

TEST(Pam, ConfigValidation) {
  PamConfig c;
  c.alpha0 = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = PamConfig{};
  c.k_max = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Pam, SolveInvariants) {
  const auto data = fixture::example_data(41, 8, 2, 6);
  BarycenterProblem problem(data, 4);
  PamConfig config;
  config.seed = 2;
  const PamResult r = solve_barycenter(problem, config);
  for (std::size_t t = 0; t < data.size(); ++t) {
    EXPECT_GE(r.state.plans[t].minCoeff(), 0.0);
    EXPECT_LT((r.state.plans[t].colwise().sum().transpose() - data[t].weights()).cwiseAbs().maxCoeff(),
              1e-12);
  }
  EXPECT_GE(r.state.w.minCoeff(), 0.0);
  EXPECT_NEAR(r.state.w.sum(), 1.0, 1e-12);
  if (r.report.converged) EXPECT_LE(r.report.pinfeas, 1e-4);
  EXPECT_EQ(r.report.outer_iterations, static_cast<long>(r.trace.iterations.size()));
  EXPECT_LE(r.report.outer_iterations, 100);
  EXPECT_NEAR(r.report.objval, evaluate_objval(r.state.w, r.state.x, problem), 1e-14);
  EXPECT_EQ(r.report.method, "pam");
}

TEST(Pam, Deterministic) {
  const auto data = fixture::example_data(42, 6, 2, 5);
  BarycenterProblem problem(data, 3);
  PamConfig config;
  config.seed = 9;
  PamResult a = solve_barycenter(problem, config);
  PamResult b = solve_barycenter(problem, config);
  a.report.wall_time_s = b.report.wall_time_s = 0.0;
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.state.x, b.state.x);
  EXPECT_EQ(a.state.w, b.state.w);
}

TEST(Pam, ObjectiveDecreasesFromStart) {
  const auto data = fixture::example_data(43, 10, 2, 6);
  BarycenterProblem problem(data, 4);
  const PamResult r = solve_barycenter(problem, PamConfig{});
  ASSERT_FALSE(r.trace.iterations.empty());
  EXPECT_LT(r.trace.iterations.back().psi, r.trace.initial_psi);
}

}  // namespace
}  // namespace wbary
