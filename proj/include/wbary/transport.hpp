#pragma once

#include "wbary/model.hpp"

namespace wbary {

/// Balanced transportation problem: min <Z, C> s.t. Z e = p, Z^T e = q, Z >= 0.
struct TransportInstance {
  Matrix cost;  // m_p x m_q, entrywise >= 0
  Vector p;     // row marginals
  Vector q;     // column marginals
};

/// Optimal plan and value, plus dual potentials certifying optimality:
/// u_i + v_j <= C_ij everywhere with equality on the support of the plan.
struct TransportSolution {
  Matrix plan;
  double value = 0.0;
  Vector u;
  Vector v;
  long pivots = 0;
};

/// Exact solve by the transportation (network) simplex method on the bipartite
/// graph. The initial basis comes from the north-west corner rule; entering
/// arcs use Dantzig's rule and switch to Bland's rule after a run of
/// degenerate pivots. Zero-mass rows and columns are removed before solving
/// and reinserted as zero rows and columns of the plan.
TransportSolution solve_transport(const TransportInstance& instance);

/// Exact optimum by enumerating every spanning-tree basis of the
/// transportation polytope. Test oracle; requires m_p + m_q <= 8.
TransportSolution brute_force_transport(const TransportInstance& instance);

/// Squared 2-Wasserstein distance between two distributions.
double w2_squared(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// 2-Wasserstein distance (square root of the transport LP optimum).
double w2_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Squared distance between a barycenter-like pair (weights, support) and a
/// distribution. Weights may contain zeros.
double w2_squared(const Vector& weights, const Matrix& support, const DiscreteDistribution& q);

}  // namespace wbary
