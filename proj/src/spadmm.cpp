#include "wbary/spadmm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbary/parallel.hpp"
#include "wbary/projections.hpp"

namespace wbary {
namespace {

std::vector<double>& projection_scratch() {
  thread_local std::vector<double> scratch;
  return scratch;
}

double squared_row_residual(const SpadmmState& state) {
  double sq = 0.0;
  for (const auto& z : state.plans) sq += (z.rowwise().sum() - state.w).squaredNorm();
  return sq;
}

}  // namespace

void QpSubproblem::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("QP subproblem needs alpha > 0, got " + format_double(alpha));
  }
  const Index n = num_blocks();
  if (n < 1) throw InvalidArgument("QP subproblem has no blocks");
  if (static_cast<Index>(anchor_plans.size()) != n || static_cast<Index>(marginals.size()) != n) {
    throw InvalidArgument("QP subproblem: costs, anchors and marginals differ in count");
  }
  const Index m = support_size();
  for (Index t = 0; t < n; ++t) {
    if (costs[t].rows() != m || anchor_plans[t].rows() != m ||
        costs[t].cols() != marginals[t].size() || anchor_plans[t].cols() != marginals[t].size()) {
      throw InvalidArgument("QP subproblem: block " + std::to_string(t) + " has wrong shape");
    }
  }
}

QpSubproblem make_subproblem(const BarycenterProblem& problem, const BarycenterState& anchor,
                             double alpha) {
  check_state_shape(anchor, problem);
  QpSubproblem sub;
  sub.costs = cost_matrices(anchor.x, problem);
  sub.anchor_plans = anchor.plans;
  sub.anchor_w = anchor.w;
  sub.alpha = alpha;
  sub.marginals.reserve(problem.distributions().size());
  for (const auto& p : problem.distributions()) sub.marginals.push_back(p.weights());
  sub.marginal_norm = problem.marginal_norm();
  sub.validate();
  return sub;
}

SpadmmState initial_spadmm_state(const QpSubproblem& sub, const SpadmmConfig& config) {
  SpadmmState s;
  s.plans = sub.anchor_plans;
  s.w = sub.anchor_w;
  s.multipliers.assign(sub.costs.size(), Vector::Zero(sub.support_size()));
  s.beta = config.beta0;
  s.tau = config.tau;
  return s;
}

void spadmm_step(SpadmmState& state, const QpSubproblem& sub) {
  const Index blocks = sub.num_blocks();
  const double alpha = sub.alpha;
  const double beta = state.beta;
  const double inv_n = 1.0 / static_cast<double>(blocks);

  // (a) Z^t <- Pi_Sigma_t(H^t / sigma_t).
  parallel_for(blocks, [&](std::ptrdiff_t t) {
    Matrix& z = state.plans[t];
    const double sigma = state.sigma(sub, t);
    const Vector shift = beta * (state.w - z.rowwise().sum()) - state.multipliers[t];
    Matrix h = (sigma - alpha) * z + alpha * sub.anchor_plans[t] - inv_n * sub.costs[t];
    h.colwise() += shift;
    h /= sigma;
    project_sigma_inplace(h, sub.marginals[t], projection_scratch());
    z = std::move(h);
  });

  // (b) w <- Pi_Delta([sum_t (beta Z^t e + lambda^t) + alpha w^k] / (beta N + alpha)).
  Vector acc = alpha * sub.anchor_w;
  for (Index t = 0; t < blocks; ++t) {
    acc += beta * state.plans[t].rowwise().sum() + state.multipliers[t];
  }
  acc /= beta * static_cast<double>(blocks) + alpha;
  project_simplex_inplace(acc, 1.0, projection_scratch());
  state.w = std::move(acc);

  // (c) multiplier step.
  const double step = state.tau * beta;
  for (Index t = 0; t < blocks; ++t) {
    state.multipliers[t] += step * (state.plans[t].rowwise().sum() - state.w);
    if (!state.multipliers[t].allFinite() || !state.plans[t].allFinite()) {
      throw NumericalError("sPADMM sweep produced a non-finite value in block " +
                           std::to_string(t) + " (beta = " + format_double(beta) +
                           ", alpha = " + format_double(alpha) + ")");
    }
  }
}

double primal_value(const std::vector<Matrix>& plans, const Vector& w, const QpSubproblem& sub) {
  const double inv_n = 1.0 / static_cast<double>(sub.num_blocks());
  double value = 0.5 * sub.alpha * (w - sub.anchor_w).squaredNorm();
  for (Index t = 0; t < sub.num_blocks(); ++t) {
    value += inv_n * plans[t].cwiseProduct(sub.costs[t]).sum() +
             0.5 * sub.alpha * (plans[t] - sub.anchor_plans[t]).squaredNorm();
  }
  return value;
}

// The dual function is the Lagrangian at its minimizer over Sigma x Delta:
// P_t = Pi_Sigma_t(Zk^t - (F^t/N + lambda^t e^T)/alpha), p = Pi_Delta(wk + sum lambda / alpha).
// This equals the projection-residual form of the dual objective but avoids
// cancellation between large squared norms when alpha is small.
double dual_value(const std::vector<Vector>& multipliers, const QpSubproblem& sub) {
  const Index blocks = sub.num_blocks();
  const double alpha = sub.alpha;
  const double inv_n = 1.0 / static_cast<double>(blocks);
  std::vector<double> block_values(blocks);
  parallel_for(blocks, [&](std::ptrdiff_t t) {
    Matrix linear = inv_n * sub.costs[t];
    linear.colwise() += multipliers[t];
    Matrix p = sub.anchor_plans[t] - linear / alpha;
    project_sigma_inplace(p, sub.marginals[t], projection_scratch());
    block_values[t] =
        0.5 * alpha * (p - sub.anchor_plans[t]).squaredNorm() + p.cwiseProduct(linear).sum();
  });
  Vector lambda_sum = Vector::Zero(sub.support_size());
  for (const auto& l : multipliers) lambda_sum += l;
  Vector p = sub.anchor_w + lambda_sum / alpha;
  project_simplex_inplace(p, 1.0, projection_scratch());
  double value = 0.5 * alpha * (p - sub.anchor_w).squaredNorm() - p.dot(lambda_sum);
  for (double v : block_values) value += v;
  return value;
}

double relative_gap(double obj_p, double obj_d) {
  return std::abs(obj_p + obj_d) / (1.0 + std::abs(obj_p) + std::abs(obj_d));
}

Residuals residuals(const SpadmmState& state, const QpSubproblem& sub) {
  Residuals r;
  r.eta_p = std::sqrt(squared_row_residual(state)) /
            (state.tau * state.beta * (1.0 + sub.marginal_norm));
  r.obj_p = primal_value(state.plans, state.w, sub);
  r.obj_d = -dual_value(state.multipliers, sub);
  r.eta_gap = relative_gap(r.obj_p, r.obj_d);
  r.eta = std::max(r.eta_p, r.eta_gap);
  return r;
}

SubproblemResult solve_subproblem(const QpSubproblem& sub, double eps, const SpadmmConfig& config,
                                  std::optional<SpadmmState> warm) {
  if (!(eps > 0.0)) throw InvalidArgument("solve_subproblem needs eps > 0");
  if (!(config.tau > 0.0 && config.tau < (1.0 + std::sqrt(5.0)) / 2.0)) {
    throw InvalidArgument("sPADMM step factor tau must lie in (0, (1+sqrt 5)/2)");
  }
  if (!(config.beta0 > 0.0)) throw InvalidArgument("sPADMM penalty beta must be positive");
  sub.validate();

  SubproblemResult result{warm ? std::move(*warm) : initial_spadmm_state(sub, config), {}};
  SpadmmState& state = result.state;
  state.tau = config.tau;
  if (static_cast<Index>(state.multipliers.size()) != sub.num_blocks()) {
    state.multipliers.assign(sub.costs.size(), Vector::Zero(sub.support_size()));
  }
  SubproblemStats& stats = result.stats;

  // Residuals summed over the current adaptation window. Single-sweep values
  // spike, and balancing on them makes beta oscillate.
  double window_primal = 0.0;
  double window_dual = 0.0;
  for (long sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    const Vector w_prev = state.w;
    spadmm_step(state, sub);
    stats.sweeps = sweep;

    const double primal_res = std::sqrt(squared_row_residual(state));
    window_primal += primal_res;
    window_dual += state.beta * (state.w - w_prev).norm();
    const double eta_p = primal_res / (state.tau * state.beta * (1.0 + sub.marginal_norm));
    if (eta_p <= eps) {
      stats.final = residuals(state, sub);
      if (std::max(stats.final.eta_p, 0.1 * stats.final.eta_gap) <= eps) {
        stats.converged = true;
        return result;
      }
    }

    if (config.adapt_beta && sweep % config.adapt_interval == 0) {
      double beta = state.beta;
      if (window_primal > config.adapt_ratio * window_dual) {
        beta = std::min(2.0 * beta, config.beta_max);
      } else if (window_dual > config.adapt_ratio * window_primal) {
        beta = std::max(0.5 * beta, config.beta_min);
      }
      window_primal = 0.0;
      window_dual = 0.0;
      if (beta != state.beta) {
        state.beta = beta;
        ++stats.beta_changes;
      }
    }
  }
  stats.final = residuals(state, sub);
  return result;
}

}  // namespace wbary
