#include "wbary/projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

namespace wbary {
namespace {

void check_radius(double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("simplex radius must be positive and finite, got " +
                          format_double(radius));
  }
}

}  // namespace

void project_simplex_inplace(Eigen::Ref<Vector> v, double radius, std::vector<double>& scratch) {
  check_radius(radius);
  const Index n = v.size();
  if (n == 0) throw InvalidArgument("cannot project an empty vector onto the simplex");
  if (!v.allFinite()) throw InvalidArgument("simplex projection input is not finite");

  scratch.assign(v.data(), v.data() + n);
  std::sort(scratch.begin(), scratch.end(), std::greater<>());

  // Largest k with u_k > (sum_{i<=k} u_i - r) / k; theta is that ratio.
  double cumulative = 0.0;
  double theta = 0.0;
  for (Index k = 0; k < n; ++k) {
    cumulative += scratch[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (scratch[k] > candidate) theta = candidate;
  }
  for (Index i = 0; i < n; ++i) v[i] = std::max(v[i] - theta, 0.0);
}

Vector project_simplex(const Vector& v, double radius) {
  Vector out = v;
  std::vector<double> scratch;
  project_simplex_inplace(out, radius, scratch);
  return out;
}

void project_sigma_inplace(Matrix& m, const Vector& b, std::vector<double>& scratch) {
  if (m.cols() != b.size()) {
    throw InvalidArgument("project_sigma: matrix has " + std::to_string(m.cols()) +
                          " columns but marginal has length " + std::to_string(b.size()));
  }
  for (Index j = 0; j < b.size(); ++j) {
    if (!(b[j] > 0.0)) {
      throw InvalidArgument("project_sigma: column mass b_" + std::to_string(j) +
                            " must be positive");
    }
  }
  for (Index j = 0; j < m.cols(); ++j) project_simplex_inplace(m.col(j), b[j], scratch);
}

Matrix project_sigma(const Matrix& m, const Vector& b) {
  Matrix out = m;
  std::vector<double> scratch;
  project_sigma_inplace(out, b, scratch);
  return out;
}

}  // namespace wbary
