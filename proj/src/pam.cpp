#include "wbary/pam.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "wbary/rng.hpp"

namespace wbary {
namespace {

bool same_row(const Matrix& a, Index i, const Matrix& b, Index j) {
  return (a.row(i).array() == b.row(j).array()).all();
}

std::map<std::string, std::string> echo(const PamConfig& c) {
  return {
      {"alpha0", format_double(c.alpha0)},
      {"alpha_min", format_double(c.alpha_min)},
      {"rho", format_double(c.rho)},
      {"eps0", format_double(c.eps0)},
      {"eps_decay", format_double(c.eps_decay)},
      {"eps_min", format_double(c.eps_min)},
      {"pinf_tol", format_double(c.pinf_tol)},
      {"k_max", std::to_string(c.k_max)},
      {"tau", format_double(c.inner.tau)},
      {"beta0", format_double(c.inner.beta0)},
      {"max_sweeps", std::to_string(c.inner.max_sweeps)},
      {"inner_tol_override", format_double(c.inner_tol_override)},
  };
}

}  // namespace

void PamConfig::validate() const {
  if (!(alpha_min > 0.0 && alpha0 >= alpha_min)) {
    throw InvalidArgument("PAM needs alpha0 >= alpha_min > 0");
  }
  if (!(rho > 0.0)) throw InvalidArgument("PAM needs rho > 0");
  if (!(eps_min > 0.0 && eps0 >= eps_min)) throw InvalidArgument("PAM needs eps0 >= eps_min > 0");
  if (!(eps_decay > 0.0 && eps_decay < 1.0)) throw InvalidArgument("PAM needs 0 < eps_decay < 1");
  if (k_max < 1) throw InvalidArgument("PAM needs k_max >= 1");
  if (pinf_tol < 0.0) throw InvalidArgument("PAM needs pinf_tol >= 0");
}

BarycenterState init_state(const BarycenterProblem& problem, std::uint64_t seed) {
  const Index m = problem.support_size();
  const Index d = problem.dim();

  // Distinct pooled support points, in lexicographic order.
  Matrix all(problem.total_support(), d);
  Index row = 0;
  for (const auto& p : problem.distributions()) {
    all.middleRows(row, p.size()) = p.support();
    row += p.size();
  }
  std::vector<Index> sorted(all.rows());
  for (Index k = 0; k < all.rows(); ++k) sorted[k] = k;
  auto less = [&](Index a, Index b) {
    for (Index c = 0; c < d; ++c) {
      if (all(a, c) != all(b, c)) return all(a, c) < all(b, c);
    }
    return false;
  };
  std::stable_sort(sorted.begin(), sorted.end(), less);
  std::vector<Index> unique_rows;
  for (Index k : sorted) {
    if (unique_rows.empty() || !same_row(all, unique_rows.back(), all, k)) unique_rows.push_back(k);
  }
  const auto distinct = static_cast<Index>(unique_rows.size());
  Matrix pool(distinct, d);
  for (Index k = 0; k < distinct; ++k) pool.row(k) = all.row(unique_rows[k]);

  Rng rng(seed);
  std::vector<Index> order(distinct);
  for (Index k = 0; k < distinct; ++k) order[k] = k;
  // Partial Fisher-Yates: the first min(m, distinct) entries are a uniform
  // sample without replacement.
  const Index take = std::min(m, distinct);
  for (Index k = 0; k < take; ++k) {
    const auto r = k + static_cast<Index>(rng.below(static_cast<std::uint64_t>(distinct - k)));
    std::swap(order[k], order[r]);
  }

  BarycenterState s;
  s.x.resize(m, d);
  for (Index i = 0; i < take; ++i) s.x.row(i) = pool.row(order[i]);
  for (Index i = take; i < m; ++i) {
    s.x.row(i) = pool.row(static_cast<Index>(rng.below(static_cast<std::uint64_t>(distinct))));
  }

  s.w = Vector::Constant(m, 1.0 / static_cast<double>(m));
  s.plans.reserve(problem.distributions().size());
  for (const auto& p : problem.distributions()) {
    s.plans.push_back(Vector::Constant(m, 1.0 / static_cast<double>(m)) *
                      p.weights().transpose());
  }
  return s;
}

Matrix x_update(const std::vector<Matrix>& plans, const Matrix& x_prev, double rho,
                const BarycenterProblem& problem) {
  if (rho < 0.0) throw InvalidArgument("x_update needs rho >= 0");
  if (static_cast<Index>(plans.size()) != problem.num_distributions()) {
    throw InvalidArgument("x_update: one plan per distribution expected");
  }
  const Index m = x_prev.rows();
  const double rho_n = rho * static_cast<double>(problem.num_distributions());

  Matrix weighted = Matrix::Zero(m, problem.dim());
  Vector mass = Vector::Zero(m);
  for (std::size_t t = 0; t < plans.size(); ++t) {
    if (plans[t].rows() != m || plans[t].cols() != problem[t].size()) {
      throw InvalidArgument("x_update: plan " + std::to_string(t) + " has wrong shape");
    }
    weighted.noalias() += plans[t] * problem[t].support();
    mass += plans[t].rowwise().sum();
  }

  Matrix x(m, problem.dim());
  for (Index i = 0; i < m; ++i) {
    const double denom = 2.0 * mass[i] + rho_n;
    if (denom > 0.0) {
      x.row(i) = (2.0 * weighted.row(i) + rho_n * x_prev.row(i)) / denom;
    } else {
      x.row(i) = x_prev.row(i);
    }
  }
  return x;
}

Schedule update_schedules(double prox_energy, double f_value, double alpha, double eps,
                          const PamConfig& config) {
  Schedule next{alpha, std::max(config.eps_min, config.eps_decay * eps)};
  if (prox_energy > config.alpha_energy_ratio * f_value) {
    next.alpha = std::max(config.alpha_min, config.alpha_shrink * alpha);
  }
  return next;
}

PamResult solve_barycenter(const BarycenterProblem& problem, const PamConfig& config,
                           std::optional<BarycenterState> init) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();

  PamResult result;
  BarycenterState& state = result.state;
  state = init ? std::move(*init) : init_state(problem, config.seed);
  check_state_shape(state, problem);

  result.trace.initial_psi = objective(state, problem);

  double alpha = config.alpha0;
  double eps = config.eps0;
  std::optional<SpadmmState> inner;
  long inner_total = 0;
  bool converged = false;

  for (long k = 0; k < config.k_max; ++k) {
    const QpSubproblem sub = make_subproblem(problem, state, alpha);
    const double inner_eps = config.inner_tol_override > 0.0 ? config.inner_tol_override : eps;
    SubproblemResult solved = solve_subproblem(sub, inner_eps, config.inner, std::move(inner));
    inner_total += solved.stats.sweeps;

    // (S.1) result and the quantities the alpha rule needs.
    double dz = 0.0;
    for (std::size_t t = 0; t < state.plans.size(); ++t) {
      dz += (solved.state.plans[t] - state.plans[t]).squaredNorm();
    }
    const double dw = (solved.state.w - state.w).squaredNorm();
    const double f_mid = objective(solved.state.plans, sub.costs);

    // (S.2)
    Matrix x_next = x_update(solved.state.plans, state.x, config.rho, problem);
    const double dx = (x_next - state.x).squaredNorm();
    if (!x_next.allFinite()) throw NumericalError("PAM: x-update produced non-finite support");

    state.plans = solved.state.plans;
    state.w = solved.state.w;
    state.x = std::move(x_next);
    inner = std::move(solved.state);

    PamIterationRecord rec;
    rec.psi = objective(state, problem);
    rec.pinfeas = pinfeas(state, problem);
    rec.alpha = alpha;
    rec.eps = inner_eps;
    rec.inner_sweeps = solved.stats.sweeps;
    rec.inner_converged = solved.stats.converged;
    rec.step_norm = std::sqrt(dz + dw + dx);
    result.trace.iterations.push_back(rec);

    if (!std::isfinite(rec.psi)) throw NumericalError("PAM: objective became non-finite");
    if (rec.pinfeas <= config.pinf_tol) {
      converged = true;
      break;
    }

    // (S.3)
    const Schedule next = update_schedules(0.5 * alpha * (dz + dw), f_mid, alpha, eps, config);
    alpha = next.alpha;
    eps = next.eps;
  }

  SolveReport& report = result.report;
  report.method = "pam";
  report.objval = evaluate_objval(state.w, state.x, problem);
  report.pinfeas = pinfeas(state, problem);
  report.outer_iterations = static_cast<long>(result.trace.iterations.size());
  report.inner_iterations = inner_total;
  report.converged = converged;
  report.m = problem.support_size();
  report.seed = config.seed;
  report.config = echo(config);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace wbary
