#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wbary/errors.hpp"

namespace wbary {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerance on the total mass of an ingested weight vector.
inline constexpr double kWeightSumTolerance = 1e-12;

/// A finitely supported probability measure: support points a_j (rows of an
/// n x d matrix) carrying probabilities b_j.
///
/// Construction validates and normalizes. Weights must be non-negative and sum
/// to one within kWeightSumTolerance; they are then divided by their sum so the
/// stored vector is normalized to machine precision. Points of zero weight are
/// dropped with a warning.
class DiscreteDistribution {
 public:
  DiscreteDistribution(Matrix support, Vector weights);

  /// Builds a distribution from arbitrary positive masses, normalizing them.
  static DiscreteDistribution from_masses(Matrix support, Vector masses);

  const Matrix& support() const noexcept { return support_; }
  const Vector& weights() const noexcept { return weights_; }
  Index size() const noexcept { return weights_.size(); }
  Index dim() const noexcept { return support_.cols(); }

 private:
  struct Normalized {};
  DiscreteDistribution(Matrix support, Vector weights, Normalized);

  Matrix support_;
  Vector weights_;
};

/// N distributions sharing a dimension, plus the barycenter support size m.
class BarycenterProblem {
 public:
  BarycenterProblem(std::vector<DiscreteDistribution> distributions, Index m);

  const std::vector<DiscreteDistribution>& distributions() const noexcept {
    return distributions_;
  }
  const DiscreteDistribution& operator[](std::size_t t) const { return distributions_[t]; }

  Index num_distributions() const noexcept {
    return static_cast<Index>(distributions_.size());
  }
  Index support_size() const noexcept { return m_; }
  Index dim() const noexcept { return dim_; }
  /// n = sum_t n_t.
  Index total_support() const noexcept { return total_support_; }
  /// Euclidean norm of the stacked marginals (b^1; ...; b^N).
  double marginal_norm() const noexcept { return marginal_norm_; }

 private:
  std::vector<DiscreteDistribution> distributions_;
  Index m_;
  Index dim_ = 0;
  Index total_support_ = 0;
  double marginal_norm_ = 0.0;
};

/// Transport plans Z^t (m x n_t), barycenter weights w and support x (m x d).
/// Column sums of Z^t match b^t; the row-sum residual Z^t e - w is what the
/// solvers drive to zero.
struct BarycenterState {
  std::vector<Matrix> plans;
  Vector w;
  Matrix x;
};

/// Outcome of one barycenter solve. `config` echoes the parameters as text.
struct SolveReport {
  std::string method;
  double objval = 0.0;
  double pinfeas = 0.0;
  long outer_iterations = 0;
  long inner_iterations = 0;
  double wall_time_s = 0.0;
  bool converged = false;
  Index m = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> config;

  bool operator==(const SolveReport&) const = default;
};

/// [F(x)]_ij = ||x_i - a_j||^2, an m x n_t matrix.
Matrix cost_matrix(const Matrix& x, const DiscreteDistribution& p);

/// F^t(x) for every distribution of the problem.
std::vector<Matrix> cost_matrices(const Matrix& x, const BarycenterProblem& problem);

/// f(Z, w, x) = (1/N) sum_t <Z^t, F^t(x)>.
double objective(const BarycenterState& state, const BarycenterProblem& problem);

/// Same value from precomputed cost matrices.
double objective(const std::vector<Matrix>& plans, const std::vector<Matrix>& costs);

/// max_t ||Z^t e - w|| / (1 + ||b||).
double pinfeas(const std::vector<Matrix>& plans, const Vector& w, double marginal_norm);
double pinfeas(const BarycenterState& state, const BarycenterProblem& problem);

/// Canonical objective of a candidate barycenter (w, x): the transport LPs
/// against every P^t are re-solved exactly and (1/N) sum_t W^2(Q, P^t) returned.
double evaluate_objval(const Vector& w, const Matrix& x, const BarycenterProblem& problem);

/// Throws InvalidArgument unless the state's shapes agree with the problem.
void check_state_shape(const BarycenterState& state, const BarycenterProblem& problem);

/// Format used for every floating value echoed into reports.
std::string format_double(double value);

}  // namespace wbary
