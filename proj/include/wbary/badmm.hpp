#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wbary/model.hpp"

namespace wbary {

struct BadmmConfig {
  // KL penalty; a non-positive value selects the mean entry of F(x^0).
  double rho_kl = 0.0;
  double pinf_tol = 1e-4;
  long k_max = 2000;
  std::uint64_t seed = 0;
};

/// Iterates of the three-block Bregman ADMM. `plans` carry the column
/// constraints (Sigma_t), `split` the row constraints (rows sum to w).
struct BadmmState {
  std::vector<Matrix> plans;
  std::vector<Matrix> split;
  Vector w;
  Matrix x;
  std::vector<Matrix> multipliers;
  double rho = 1.0;
};

/// Y^0 = Z^0 and zero multipliers on top of a barycenter start.
BadmmState make_badmm_state(const BarycenterState& init, double rho);

/// One cycle Z -> w -> Y -> x -> Lambda:
///   Z_ij ∝ Y_ij exp(-(F_ij + Lambda_ij)/rho), columns scaled to b_j;
///   w = (1/N) sum_t Z^t e;
///   Y_ij ∝ Z_ij exp(Lambda_ij/rho), rows scaled to w_i;
///   x_i = mass-weighted mean of the support points (rows without mass keep x_i);
///   Lambda += rho (Z - Y).
/// Exponentials are evaluated with the per-column/row maximum subtracted.
void badmm_step(BadmmState& state, const BarycenterProblem& problem);

struct BadmmResult {
  BarycenterState state;
  SolveReport report;
  std::vector<double> pinfeas_trace;
};

/// Iterates until pinfeas (measured on Z) <= pinf_tol or k_max cycles. Starts
/// from the same feasible point as PAM unless `init` is given.
BadmmResult solve_badmm(const BarycenterProblem& problem, const BadmmConfig& config,
                        std::optional<BarycenterState> init = std::nullopt);

}  // namespace wbary
