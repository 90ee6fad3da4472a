#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "wbary/badmm.hpp"
#include "wbary/pam.hpp"
#include "wbary/rng.hpp"

namespace wbary {
namespace {

TEST(Badmm, ColumnUpdateMatchesKlOracle) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = fixture::random_distribution(rng, 3, 2);
    BarycenterProblem problem({p}, 4);
    BarycenterState init = init_state(problem, trial);
    // Non-uniform split plan and multipliers.
    for (Index k = 0; k < init.plans[0].size(); ++k) init.plans[0].data()[k] *= rng.uniform(0.2, 2.0);
    for (Index j = 0; j < p.size(); ++j) {
      init.plans[0].col(j) *= p.weights()[j] / init.plans[0].col(j).sum();
    }
    const double rho = rng.uniform(0.1, 2.0);
    BadmmState s = make_badmm_state(init, rho);
    for (Index k = 0; k < s.multipliers[0].size(); ++k) s.multipliers[0].data()[k] = rng.uniform(-0.5, 0.5);
    const Matrix y = s.split[0];
    const Matrix lambda = s.multipliers[0];
    const Matrix cost = cost_matrix(s.x, p);
    badmm_step(s, problem);
    for (Index j = 0; j < p.size(); ++j) {
      const Vector ref = oracle::kl_column(y.col(j), cost.col(j) + lambda.col(j), rho, p.weights()[j]);
      ASSERT_LT((s.plans[0].col(j) - ref).cwiseAbs().maxCoeff(), 1e-8);
    }
  }
}

TEST(Badmm, MarginalsAfterEveryStep) {
  const auto data = fixture::example_data(5, 6, 2, 5);
  BarycenterProblem problem(data, 4);
  BadmmState s = make_badmm_state(init_state(problem, 0), 1.0);
  for (int k = 0; k < 50; ++k) {
    badmm_step(s, problem);
    ASSERT_NEAR(s.w.sum(), 1.0, 1e-12);
    ASSERT_GE(s.w.minCoeff(), 0.0);
    for (std::size_t t = 0; t < data.size(); ++t) {
      ASSERT_LT((s.plans[t].colwise().sum().transpose() - data[t].weights()).cwiseAbs().maxCoeff(), 1e-12);
      ASSERT_LT((s.split[t].rowwise().sum() - s.w).cwiseAbs().maxCoeff(), 1e-12);
      ASSERT_NEAR(s.plans[t].sum(), 1.0, 1e-12);
      ASSERT_NEAR(s.split[t].sum(), 1.0, 1e-12);
    }
  }
}

TEST(Badmm, ConstantExponentsGiveUniformColumns) {
  // Every support point of P equals the single x, so F is constant per column.
  const DiscreteDistribution p(Matrix::Constant(2, 2, 1.0), (Vector(2) << 0.4, 0.6).finished());
  BarycenterProblem problem({p}, 3);
  BarycenterState init = init_state(problem, 0);
  BadmmState s = make_badmm_state(init, 0.7);
  badmm_step(s, problem);
  EXPECT_LT((s.plans[0].col(0) - Vector::Constant(3, 0.4 / 3.0)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((s.plans[0].col(1) - Vector::Constant(3, 0.2)).cwiseAbs().maxCoeff(), 1e-15);
  // Z = Y at this point, so the multipliers stay zero.
  EXPECT_LT(s.multipliers[0].cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Badmm, SinglePointCollapses) {
  const DiscreteDistribution p(Matrix::Constant(1, 2, 3.0), Vector::Ones(1));
  BarycenterProblem problem({p, p}, 2);
  const BadmmResult r = solve_badmm(problem, BadmmConfig{});
  EXPECT_LE(r.report.outer_iterations, 2);
  EXPECT_TRUE(r.report.converged);
  EXPECT_EQ(r.state.x, Matrix::Constant(2, 2, 3.0));
  EXPECT_NEAR(r.report.objval, 0.0, 1e-14);
}

TEST(Badmm, DefaultRhoIsMeanCost) {
  const auto data = fixture::example_data(6, 4, 2, 5);
  BarycenterProblem problem(data, 3);
  const BarycenterState init = init_state(problem, 0);
  double total = 0.0, count = 0.0;
  for (const auto& f : cost_matrices(init.x, problem)) {
    total += f.sum();
    count += static_cast<double>(f.size());
  }
  BadmmConfig config;
  config.k_max = 1;
  const BadmmResult r = solve_badmm(problem, config, init);
  EXPECT_EQ(r.report.config.at("rho_kl"), format_double(total / count));
}

TEST(Badmm, Deterministic) {
  const auto data = fixture::example_data(7, 5, 2, 4);
  BarycenterProblem problem(data, 3);
  BadmmConfig config;
  config.k_max = 200;
  BadmmResult a = solve_badmm(problem, config);
  BadmmResult b = solve_badmm(problem, config);
  a.report.wall_time_s = b.report.wall_time_s = 0.0;
  EXPECT_EQ(a.report, b.report);
  EXPECT_EQ(a.pinfeas_trace, b.pinfeas_trace);
}

TEST(Badmm, RejectsBadParameters) {
  const auto data = fixture::example_data(8, 2, 2, 3);
  BarycenterProblem problem(data, 2);
  EXPECT_THROW(make_badmm_state(init_state(problem, 0), 0.0), InvalidArgument);
  BadmmConfig config;
  config.k_max = 0;
  EXPECT_THROW(solve_badmm(problem, config), InvalidArgument);
}

}  // namespace
}  // namespace wbary
