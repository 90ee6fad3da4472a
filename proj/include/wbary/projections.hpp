#pragma once

#include <vector>

#include "wbary/model.hpp"

namespace wbary {

/// Euclidean projection of v onto the scaled simplex {z >= 0, sum z = radius}.
///
/// Sort-based threshold rule: z_i = max(v_i - theta, 0) with theta chosen so
/// the entries sum to `radius`. Throws InvalidArgument for radius <= 0 or
/// non-finite input.
Vector project_simplex(const Vector& v, double radius = 1.0);

/// In-place variant. `scratch` is resized as needed and reused across calls.
void project_simplex_inplace(Eigen::Ref<Vector> v, double radius, std::vector<double>& scratch);

/// Column-wise projection onto Sigma_t = {Z >= 0, Z^T e = b}: column j of the
/// result is project_simplex(column j of M, b_j). Every b_j must be positive.
Matrix project_sigma(const Matrix& m, const Vector& b);

/// In-place variant of project_sigma used by the inner solver.
void project_sigma_inplace(Matrix& m, const Vector& b, std::vector<double>& scratch);

}  // namespace wbary
