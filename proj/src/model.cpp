#include "wbary/model.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>

#include "wbary/log.hpp"
#include "wbary/parallel.hpp"
#include "wbary/transport.hpp"

namespace wbary {
namespace {

void check_support(const Matrix& support, const Vector& weights) {
  if (support.rows() != weights.size()) {
    throw InvalidArgument("distribution has " + std::to_string(support.rows()) +
                          " support points but " + std::to_string(weights.size()) +
                          " weights");
  }
  if (support.cols() < 1) throw InvalidArgument("support points must have dimension >= 1");
  if (!support.allFinite()) throw InvalidArgument("support contains non-finite coordinates");
  if (!weights.allFinite()) throw InvalidArgument("weights contain non-finite values");
}

// Removes the zero-weight points, warning once per distribution.
std::pair<Matrix, Vector> drop_zero_weights(Matrix support, Vector weights) {
  Index kept = 0;
  for (Index j = 0; j < weights.size(); ++j) kept += weights[j] > 0.0 ? 1 : 0;
  if (kept == weights.size()) return {std::move(support), std::move(weights)};
  warn("dropping " + std::to_string(weights.size() - kept) +
       " zero-weight support point(s)");
  Matrix s(kept, support.cols());
  Vector w(kept);
  Index k = 0;
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0.0) {
      s.row(k) = support.row(j);
      w[k] = weights[j];
      ++k;
    }
  }
  return {std::move(s), std::move(w)};
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(Matrix support, Vector weights) {
  check_support(support, weights);
  for (Index j = 0; j < weights.size(); ++j) {
    if (weights[j] < 0.0) {
      throw InvalidArgument("negative weight " + format_double(weights[j]) + " at point " +
                            std::to_string(j));
    }
  }
  const double total = weights.sum();
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    throw InvalidArgument("weights sum to " + format_double(total) + ", expected 1");
  }
  auto [s, w] = drop_zero_weights(std::move(support), std::move(weights));
  if (w.size() == 0) throw InvalidArgument("distribution has no positive weight");
  w /= w.sum();
  support_ = std::move(s);
  weights_ = std::move(w);
}

DiscreteDistribution::DiscreteDistribution(Matrix support, Vector weights, Normalized)
    : support_(std::move(support)), weights_(std::move(weights)) {}

DiscreteDistribution DiscreteDistribution::from_masses(Matrix support, Vector masses) {
  check_support(support, masses);
  if ((masses.array() < 0.0).any()) throw InvalidArgument("masses must be non-negative");
  auto [s, w] = drop_zero_weights(std::move(support), std::move(masses));
  if (w.size() == 0) throw InvalidArgument("distribution has no positive mass");
  w /= w.sum();
  return DiscreteDistribution(std::move(s), std::move(w), Normalized{});
}

BarycenterProblem::BarycenterProblem(std::vector<DiscreteDistribution> distributions, Index m)
    : distributions_(std::move(distributions)), m_(m) {
  if (distributions_.empty()) throw InvalidArgument("barycenter problem needs N >= 1");
  if (m_ < 1) throw InvalidArgument("barycenter support size m must be >= 1");
  dim_ = distributions_.front().dim();
  double sq = 0.0;
  for (const auto& p : distributions_) {
    if (p.dim() != dim_) {
      throw InvalidArgument("distributions have mixed dimensions " + std::to_string(dim_) +
                            " and " + std::to_string(p.dim()));
    }
    total_support_ += p.size();
    sq += p.weights().squaredNorm();
  }
  marginal_norm_ = std::sqrt(sq);
}

Matrix cost_matrix(const Matrix& x, const DiscreteDistribution& p) {
  if (x.cols() != p.dim()) {
    throw InvalidArgument("cost_matrix: barycenter dimension " + std::to_string(x.cols()) +
                          " does not match distribution dimension " +
                          std::to_string(p.dim()));
  }
  const Matrix& a = p.support();
  Matrix f(x.rows(), a.rows());
  for (Index j = 0; j < a.rows(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      f(i, j) = (x.row(i) - a.row(j)).squaredNorm();
    }
  }
  return f;
}

std::vector<Matrix> cost_matrices(const Matrix& x, const BarycenterProblem& problem) {
  std::vector<Matrix> costs(problem.distributions().size());
  parallel_for(static_cast<std::ptrdiff_t>(costs.size()),
               [&](std::ptrdiff_t t) { costs[t] = cost_matrix(x, problem[t]); });
  return costs;
}

double objective(const std::vector<Matrix>& plans, const std::vector<Matrix>& costs) {
  if (plans.size() != costs.size() || plans.empty()) {
    throw InvalidArgument("objective: plan and cost counts differ");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < plans.size(); ++t) {
    if (plans[t].rows() != costs[t].rows() || plans[t].cols() != costs[t].cols()) {
      throw InvalidArgument("objective: plan " + std::to_string(t) + " has wrong shape");
    }
    total += plans[t].cwiseProduct(costs[t]).sum();
  }
  return total / static_cast<double>(plans.size());
}

double objective(const BarycenterState& state, const BarycenterProblem& problem) {
  check_state_shape(state, problem);
  return objective(state.plans, cost_matrices(state.x, problem));
}

double pinfeas(const std::vector<Matrix>& plans, const Vector& w, double marginal_norm) {
  double worst = 0.0;
  for (const auto& z : plans) {
    if (z.rows() != w.size()) throw InvalidArgument("pinfeas: plan rows differ from |w|");
    worst = std::max(worst, (z.rowwise().sum() - w).norm());
  }
  return worst / (1.0 + marginal_norm);
}

double pinfeas(const BarycenterState& state, const BarycenterProblem& problem) {
  check_state_shape(state, problem);
  return pinfeas(state.plans, state.w, problem.marginal_norm());
}

double evaluate_objval(const Vector& w, const Matrix& x, const BarycenterProblem& problem) {
  if (w.size() != x.rows()) throw InvalidArgument("evaluate_objval: |w| != rows of x");
  if (!x.allFinite() || !w.allFinite()) throw InvalidArgument("evaluate_objval: non-finite input");
  const auto n = static_cast<std::ptrdiff_t>(problem.distributions().size());
  std::vector<double> values(n);
  parallel_for(n, [&](std::ptrdiff_t t) {
    TransportInstance inst{cost_matrix(x, problem[t]), w, problem[t].weights()};
    values[t] = solve_transport(inst).value;
  });
  double total = 0.0;
  for (double v : values) total += v;
  return total / static_cast<double>(n);
}

void check_state_shape(const BarycenterState& state, const BarycenterProblem& problem) {
  const Index m = problem.support_size();
  if (static_cast<Index>(state.plans.size()) != problem.num_distributions()) {
    throw InvalidArgument("state has " + std::to_string(state.plans.size()) +
                          " plans for " + std::to_string(problem.num_distributions()) +
                          " distributions");
  }
  if (state.w.size() != m) throw InvalidArgument("state weight vector has wrong length");
  if (state.x.rows() != m || state.x.cols() != problem.dim()) {
    throw InvalidArgument("state support matrix must be m x d");
  }
  for (std::size_t t = 0; t < state.plans.size(); ++t) {
    if (state.plans[t].rows() != m || state.plans[t].cols() != problem[t].size()) {
      throw InvalidArgument("plan " + std::to_string(t) + " must be m x n_t");
    }
  }
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace wbary
