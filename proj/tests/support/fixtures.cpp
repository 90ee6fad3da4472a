#include "fixtures.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>

#include "wbary/datagen.hpp"
#include "wbary/pam.hpp"
#include "wbary/projections.hpp"

namespace wbary::fixture {

DiscreteDistribution random_distribution(Rng& rng, Index n, Index d, double scale) {
  Matrix support(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index c = 0; c < d; ++c) support(i, c) = scale * rng.uniform();
  }
  Vector masses(n);
  for (Index i = 0; i < n; ++i) masses[i] = rng.exponential() + 1e-3;
  return DiscreteDistribution::from_masses(std::move(support), std::move(masses));
}

std::vector<DiscreteDistribution> random_data(std::uint64_t seed, Index count, Index n, Index d,
                                              double scale) {
  Rng rng(seed);
  std::vector<DiscreteDistribution> out;
  for (Index t = 0; t < count; ++t) out.push_back(random_distribution(rng, n, d, scale));
  return out;
}

std::vector<DiscreteDistribution> example_data(std::uint64_t seed, Index count, Index d, Index nt) {
  GenSpec spec;
  spec.family = Family::kMvnT;
  spec.count = count;
  spec.dim = d;
  spec.nt = nt;
  spec.seed = seed;
  return generate(spec);
}

QpSubproblem random_subproblem(std::uint64_t seed, Index count, Index m, Index nt, double alpha) {
  Rng rng(seed);
  std::vector<DiscreteDistribution> data;
  for (Index t = 0; t < count; ++t) data.push_back(random_distribution(rng, nt, 2, 2.0));
  BarycenterProblem problem(data, m);
  BarycenterState anchor = init_state(problem, seed);
  // Perturb the anchors so the subproblem is not the trivial start point.
  for (Index t = 0; t < count; ++t) {
    Matrix noise(m, nt);
    for (Index i = 0; i < m; ++i) {
      for (Index j = 0; j < nt; ++j) noise(i, j) = 0.2 * rng.uniform();
    }
    anchor.plans[t] = project_sigma(anchor.plans[t] + noise, problem[t].weights());
  }
  Vector wn(m);
  for (Index i = 0; i < m; ++i) wn[i] = 0.2 * rng.uniform();
  anchor.w = project_simplex(anchor.w + wn);
  return make_subproblem(problem, anchor, alpha);
}

std::string temp_path(const std::string& name) {
  static std::atomic<int> counter{0};
  const char* env = std::getenv("WBARY_TEST_TMP");
  std::filesystem::path dir = env ? env : std::filesystem::temp_directory_path().string();
  dir /= "wbary_tmp";
  std::filesystem::create_directories(dir);
  return (dir / (std::to_string(counter++) + "_" + name)).string();
}

}  // namespace wbary::fixture
