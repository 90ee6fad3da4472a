#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wbary/model.hpp"
#include "wbary/spadmm.hpp"

namespace wbary {

/// Parameters of the inexact proximal alternating minimization. Defaults are
/// the published experimental settings.
struct PamConfig {
  double alpha0 = 100.0;
  double alpha_min = 1e-8;
  double alpha_shrink = 0.1;
  // alpha shrinks when the proximal energy exceeds this fraction of f.
  double alpha_energy_ratio = 1e-5;
  double rho = 1e-5;
  double eps0 = 5e-2;
  double eps_decay = 0.8;
  double eps_min = 1e-5;
  double pinf_tol = 1e-4;
  long k_max = 100;
  std::uint64_t seed = 0;
  // When positive, every inner solve uses this tolerance instead of eps_k.
  double inner_tol_override = 0.0;
  SpadmmConfig inner;

  void validate() const;
};

struct PamIterationRecord {
  double psi = 0.0;      // f(Z^{k+1}, w^{k+1}, x^{k+1})
  double pinfeas = 0.0;
  double alpha = 0.0;    // alpha_k used in this iteration
  double eps = 0.0;      // inner tolerance used in this iteration
  long inner_sweeps = 0;
  bool inner_converged = false;
  double step_norm = 0.0;  // ||U^{k+1} - U^k||
};

struct PamTrace {
  double initial_psi = 0.0;  // f(U^0)
  std::vector<PamIterationRecord> iterations;
};

struct PamResult {
  BarycenterState state;
  SolveReport report;
  PamTrace trace;
};

/// Feasible start: w^0 = e/m, Z^{t,0} = (1/m) e (b^t)^T, and x^0 drawn from the
/// distinct points of the pooled supports without replacement. If fewer than m
/// distinct points exist, all of them are used and the rest drawn with
/// replacement.
BarycenterState init_state(const BarycenterProblem& problem, std::uint64_t seed);

/// Closed-form minimizer of the x-subproblem
///   (1/N) sum_t sum_ij Z^t_ij ||x_i - a^t_j||^2 + (rho/2) ||x - x_prev||^2.
/// A row with no mass keeps x_prev when rho = 0.
Matrix x_update(const std::vector<Matrix>& plans, const Matrix& x_prev, double rho,
                const BarycenterProblem& problem);

struct Schedule {
  double alpha;
  double eps;
};

/// eps_{k+1} = max(eps_min, decay eps_k); alpha shrinks by alpha_shrink (floored
/// at alpha_min) when prox_energy > alpha_energy_ratio * f_value.
Schedule update_schedules(double prox_energy, double f_value, double alpha, double eps,
                          const PamConfig& config);

/// Runs the outer loop until pinfeas <= pinf_tol or k_max iterations. The
/// reported objval is the exact transport re-solve at the final (w, x).
PamResult solve_barycenter(const BarycenterProblem& problem, const PamConfig& config,
                           std::optional<BarycenterState> init = std::nullopt);

}  // namespace wbary
