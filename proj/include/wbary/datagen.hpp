#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wbary/model.hpp"

namespace wbary {

enum class Family { kMvnT, kColors, kVariedNt };

Family parse_family(const std::string& name);
std::string family_name(Family family);

/// Parameters of a synthetic dataset. `nt_grid` is used by the varied-nt
/// family; the others use `nt`.
struct GenSpec {
  Family family = Family::kMvnT;
  Index count = 1;  // N
  Index dim = 2;    // d
  Index nt = 1;
  std::vector<Index> nt_grid;
  std::uint64_t seed = 0;

  // Pinned generator constants.
  double mean_lo = 0.0;
  double mean_hi = 5.0;
  double noise_scale = 0.5;  // scale of the Student-t(3) noise
  Index pixels = 256;        // colors family: pixels per synthetic image
  Index kmeans_iterations = 10;
};

/// Parses "a:s:b" (inclusive MATLAB-style range) or a comma list.
std::vector<Index> parse_grid(const std::string& text);

/// Per distribution t: mean mu ~ U[mean_lo, mean_hi]^d, points
/// mu + N(0, I) + noise_scale * t_3 (per coordinate), weights ~ Dirichlet(1).
std::vector<DiscreteDistribution> gen_mvn_t(const GenSpec& spec);

/// Per distribution: pixels from a random three-component color mixture in
/// [0, 255]^3, clustered by a fixed-iteration k-means with k = nt; non-empty
/// clusters become support points weighted by occupancy.
std::vector<DiscreteDistribution> gen_colors(const GenSpec& spec);

/// As gen_mvn_t, with distribution t drawing nt_grid[t mod |grid|] points.
std::vector<DiscreteDistribution> gen_varied_nt(const GenSpec& spec);

/// Dispatches on spec.family.
std::vector<DiscreteDistribution> generate(const GenSpec& spec);

}  // namespace wbary
