#pragma once

#include <optional>
#include <vector>

#include "wbary/model.hpp"

namespace wbary {

/// The strongly convex QP solved at each outer PAM iteration:
///
///   min  sum_t [ (1/N) <Z^t, F^t> + (alpha/2) ||Z^t - Zk^t||^2 ] + (alpha/2) ||w - wk||^2
///   s.t. Z^t in Sigma_t,  w in Delta,  Z^t e = w  (t = 1..N).
struct QpSubproblem {
  std::vector<Matrix> costs;         // F^t(x^k)
  std::vector<Matrix> anchor_plans;  // Z^{t,k}
  Vector anchor_w;                   // w^k
  double alpha = 1.0;                // proximal weight alpha_k
  std::vector<Vector> marginals;     // b^t
  double marginal_norm = 0.0;        // ||(b^1; ...; b^N)||

  Index num_blocks() const noexcept { return static_cast<Index>(costs.size()); }
  Index support_size() const noexcept { return anchor_w.size(); }

  /// Throws InvalidArgument on inconsistent shapes or alpha <= 0.
  void validate() const;
};

/// Builds the subproblem for barycenter support x and anchors (Z^k, w^k).
QpSubproblem make_subproblem(const BarycenterProblem& problem, const BarycenterState& anchor,
                             double alpha);

/// Every adapt_interval sweeps, beta doubles if the summed primal residual
/// sqrt(sum_t ||Z^t e - w||^2) of the window exceeds adapt_ratio times the
/// summed dual residual beta ||w^{v+1} - w^v||, and halves in the opposite
/// case; beta stays within [beta_min, beta_max].
struct SpadmmConfig {
  double beta0 = 1.0;
  double tau = 1.618;
  long max_sweeps = 10000;
  bool adapt_beta = true;
  long adapt_interval = 50;
  double adapt_ratio = 10.0;
  double beta_min = 1e-4;
  double beta_max = 1e4;
};

/// Iterates of the semi-proximal ADMM. Plans stay in Sigma_t and w in Delta
/// after every sweep; multipliers are one m-vector per block.
struct SpadmmState {
  std::vector<Matrix> plans;
  Vector w;
  std::vector<Vector> multipliers;
  double beta = 1.0;
  double tau = 1.618;

  /// sigma_t = alpha + beta * n_t, which makes the semi-proximal operator
  /// (sigma_t - alpha) I - beta A^t positive semidefinite.
  double sigma(const QpSubproblem& sub, Index t) const {
    return sub.alpha + beta * static_cast<double>(sub.marginals[t].size());
  }
};

/// Zero multipliers, plans and weights copied from the anchors.
SpadmmState initial_spadmm_state(const QpSubproblem& sub, const SpadmmConfig& config);

struct Residuals {
  double eta_p = 0.0;
  double eta_gap = 0.0;
  double eta = 0.0;
  double obj_p = 0.0;
  double obj_d = 0.0;
};

/// One sweep: plans by column-wise simplex projections, then w by a simplex
/// projection, then the multiplier step lambda += tau beta (Z e - w).
/// Throws NumericalError if the sweep produces a non-finite value.
void spadmm_step(SpadmmState& state, const QpSubproblem& sub);

/// Value of the dual function at the multipliers (the maximization form).
double dual_value(const std::vector<Vector>& multipliers, const QpSubproblem& sub);

/// Primal objective of the QP at (plans, w).
double primal_value(const std::vector<Matrix>& plans, const Vector& w, const QpSubproblem& sub);

/// |obj_p + obj_d| / (1 + |obj_p| + |obj_d|).
double relative_gap(double obj_p, double obj_d);

/// eta_p = sqrt(sum_t ||Z^t e - w||^2) / (tau beta (1 + ||b||)); eta_gap as in
/// relative_gap with obj_d stored as minus the dual value, so the gap closes
/// at the QP optimum.
Residuals residuals(const SpadmmState& state, const QpSubproblem& sub);

struct SubproblemStats {
  long sweeps = 0;
  bool converged = false;
  long beta_changes = 0;
  Residuals final;
};

struct SubproblemResult {
  SpadmmState state;
  SubproblemStats stats;
};

/// Runs sweeps until max(eta_p, 0.1 eta_gap) <= eps or the sweep cap is hit;
/// in the latter case the last iterate is returned with converged = false.
/// `warm` supplies the starting (Z, w, lambda, beta); by default the anchors
/// with zero multipliers are used.
SubproblemResult solve_subproblem(const QpSubproblem& sub, double eps, const SpadmmConfig& config,
                                  std::optional<SpadmmState> warm = std::nullopt);

}  // namespace wbary
