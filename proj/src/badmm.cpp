#include "wbary/badmm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "wbary/pam.hpp"
#include "wbary/parallel.hpp"

namespace wbary {
namespace {

// Scales `out` so that out_k ∝ base_k exp(expo_k) and sum out = mass. Entries
// with base_k == 0 stay zero. Weights are formed as exp(log base_k + expo_k - max),
// so the largest term is exactly 1 even when base or the exponentials would
// underflow. Returns false if no entry can carry mass.
template <class Out, class Base, class Expo>
bool kl_scale(Out out, const Base& base, const Expo& expo, double mass) {
  const Index n = base.size();
  double smax = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < n; ++k) {
    if (base[k] > 0.0) {
      out[k] = std::log(base[k]) + expo[k];
      smax = std::max(smax, out[k]);
    }
  }
  if (!std::isfinite(smax)) return false;
  double total = 0.0;
  for (Index k = 0; k < n; ++k) {
    out[k] = base[k] > 0.0 ? std::exp(out[k] - smax) : 0.0;
    total += out[k];
  }
  const double scale = mass / total;
  for (Index k = 0; k < n; ++k) out[k] *= scale;
  return true;
}

std::map<std::string, std::string> echo(const BadmmConfig& c, double rho) {
  return {
      {"rho_kl", format_double(rho)},
      {"pinf_tol", format_double(c.pinf_tol)},
      {"k_max", std::to_string(c.k_max)},
  };
}

}  // namespace

BadmmState make_badmm_state(const BarycenterState& init, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("B-ADMM penalty must be positive");
  BadmmState s;
  s.plans = init.plans;
  s.split = init.plans;
  s.w = init.w;
  s.x = init.x;
  s.multipliers.reserve(init.plans.size());
  for (const auto& z : init.plans) s.multipliers.push_back(Matrix::Zero(z.rows(), z.cols()));
  s.rho = rho;
  return s;
}

void badmm_step(BadmmState& state, const BarycenterProblem& problem) {
  const auto blocks = static_cast<std::ptrdiff_t>(problem.num_distributions());
  const Index m = state.w.size();
  const double rho = state.rho;

  // (a) plans: column-wise KL projections onto Sigma_t.
  parallel_for(blocks, [&](std::ptrdiff_t t) {
    const Matrix cost = cost_matrix(state.x, problem[t]);
    const Vector& b = problem[t].weights();
    Matrix& z = state.plans[t];
    const Matrix& y = state.split[t];
    const Matrix& lambda = state.multipliers[t];
    for (Index j = 0; j < z.cols(); ++j) {
      const Vector expo = -(cost.col(j) + lambda.col(j)) / rho;
      if (!kl_scale(z.col(j), y.col(j), expo, b[j])) {
        throw NumericalError("B-ADMM: column " + std::to_string(j) + " of block " +
                             std::to_string(t) + " lost all mass");
      }
    }
  });

  // (b) w as the average row mass.
  Vector w = Vector::Zero(m);
  for (std::ptrdiff_t t = 0; t < blocks; ++t) w += state.plans[t].rowwise().sum();
  w /= static_cast<double>(blocks);
  state.w = w;

  // (c) split plans: row-wise KL projections onto rows summing to w.
  parallel_for(blocks, [&](std::ptrdiff_t t) {
    const Matrix& z = state.plans[t];
    Matrix& y = state.split[t];
    const Matrix& lambda = state.multipliers[t];
    for (Index i = 0; i < m; ++i) {
      const Eigen::RowVectorXd expo = lambda.row(i) / rho;
      if (!(state.w[i] > 0.0)) {
        y.row(i).setZero();
      } else if (!kl_scale(y.row(i), z.row(i), expo, state.w[i])) {
        // No mass of this block reaches row i: spread by the multipliers alone.
        const Eigen::RowVectorXd ones = Eigen::RowVectorXd::Ones(z.cols());
        kl_scale(y.row(i), ones, expo, state.w[i]);
      }
    }
  });

  // (d) support points.
  state.x = x_update(state.plans, state.x, 0.0, problem);

  // (e) multipliers.
  for (std::ptrdiff_t t = 0; t < blocks; ++t) {
    state.multipliers[t] += rho * (state.plans[t] - state.split[t]);
    if (!state.multipliers[t].allFinite()) {
      throw NumericalError("B-ADMM: multipliers became non-finite in block " + std::to_string(t));
    }
  }
}

BadmmResult solve_badmm(const BarycenterProblem& problem, const BadmmConfig& config,
                        std::optional<BarycenterState> init) {
  if (config.k_max < 1) throw InvalidArgument("B-ADMM needs k_max >= 1");
  const auto start = std::chrono::steady_clock::now();

  BarycenterState s0 = init ? std::move(*init) : init_state(problem, config.seed);
  check_state_shape(s0, problem);

  double rho = config.rho_kl;
  if (!(rho > 0.0)) {
    double total = 0.0;
    double count = 0.0;
    for (const auto& f : cost_matrices(s0.x, problem)) {
      total += f.sum();
      count += static_cast<double>(f.size());
    }
    rho = total / count;
    if (!(rho > 0.0)) rho = 1.0;
  }

  BadmmState state = make_badmm_state(s0, rho);
  BadmmResult result;
  bool converged = false;
  long iterations = 0;
  double pinf = std::numeric_limits<double>::infinity();
  while (iterations < config.k_max) {
    badmm_step(state, problem);
    ++iterations;
    pinf = pinfeas(state.plans, state.w, problem.marginal_norm());
    result.pinfeas_trace.push_back(pinf);
    if (pinf <= config.pinf_tol) {
      converged = true;
      break;
    }
  }

  result.state.plans = std::move(state.plans);
  result.state.w = std::move(state.w);
  result.state.x = std::move(state.x);

  SolveReport& report = result.report;
  report.method = "badmm";
  report.objval = evaluate_objval(result.state.w, result.state.x, problem);
  report.pinfeas = pinf;
  report.outer_iterations = iterations;
  report.inner_iterations = 0;
  report.converged = converged;
  report.m = problem.support_size();
  report.seed = config.seed;
  report.config = echo(config, rho);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace wbary
