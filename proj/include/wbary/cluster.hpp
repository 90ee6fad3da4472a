#pragma once

#include <cstdint>
#include <vector>

#include "wbary/model.hpp"
#include "wbary/pam.hpp"

namespace wbary {

/// A cluster centroid: weights and support points. Weights may contain zeros.
struct Centroid {
  Vector weights;
  Matrix support;
};

Centroid to_centroid(const DiscreteDistribution& p);

struct ClusterConfig {
  Index k = 2;
  Index m = 1;  // support size of optimized centroids
  long max_rounds = 10;
  std::uint64_t seed = 0;
  PamConfig pam;
};

/// Assignments are 0-based cluster indices.
struct ClusterModel {
  std::vector<Centroid> centroids;
  std::vector<Index> assignments;
  std::vector<double> distances;  // W^2(centroid of l^t, P^t)
  double objective = 0.0;         // sum of `distances`
  long rounds = 0;
  bool converged = false;         // assignments stable before max_rounds
};

/// l^t = argmin_s W^2(Q^s, P^t), ties broken by the lowest s. When
/// `distances` is non-null it receives the minimal squared distances.
std::vector<Index> assign(const std::vector<DiscreteDistribution>& data,
                          const std::vector<Centroid>& centroids,
                          std::vector<double>* distances = nullptr);

/// Indices of k distinct data points: the first uniformly at random, each
/// further one with probability proportional to its squared distance to the
/// nearest already chosen point.
std::vector<Index> seed_centroids(const std::vector<DiscreteDistribution>& data, Index k,
                                  std::uint64_t seed);

/// Alternates centroid optimization (a barycenter per cluster) and assignment
/// until assignments stop changing or max_rounds is reached. Empty clusters
/// are re-seeded with the datum farthest from its centroid.
ClusterModel d2_cluster(const std::vector<DiscreteDistribution>& data, const ClusterConfig& config);

}  // namespace wbary
