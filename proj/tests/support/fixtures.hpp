#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wbary/model.hpp"
#include "wbary/rng.hpp"
#include "wbary/spadmm.hpp"

namespace wbary::fixture {

/// n points uniform in [0, scale]^d with Dirichlet(1) weights.
DiscreteDistribution random_distribution(Rng& rng, Index n, Index d, double scale = 1.0);

/// N such distributions of size n.
std::vector<DiscreteDistribution> random_data(std::uint64_t seed, Index count, Index n, Index d,
                                              double scale = 1.0);

/// Mixture-of-normal-and-t data from the generator (count, d, n_t).
std::vector<DiscreteDistribution> example_data(std::uint64_t seed, Index count, Index d, Index nt);

/// A random inner QP: random data, random feasible anchors, given alpha.
QpSubproblem random_subproblem(std::uint64_t seed, Index count, Index m, Index nt, double alpha);

/// Directory for scratch files, unique per call.
std::string temp_path(const std::string& name);

}  // namespace wbary::fixture
