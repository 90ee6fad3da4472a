#include "wbary/cluster.hpp"

#include <limits>
#include <optional>
#include <string>

#include "wbary/parallel.hpp"
#include "wbary/rng.hpp"
#include "wbary/transport.hpp"

namespace wbary {

Centroid to_centroid(const DiscreteDistribution& p) { return {p.weights(), p.support()}; }

namespace {

// Start a cluster's barycenter solve at its current centroid, coupled optimally
// to every member. Falls back to the generic start when the centroid's support
// size differs from m (e.g. a data point used as seed).
std::optional<BarycenterState> centroid_start(const Centroid& c, const BarycenterProblem& problem) {
  if (c.weights.size() != problem.support_size()) return std::nullopt;
  BarycenterState s;
  s.w = c.weights;
  s.x = c.support;
  s.plans.resize(problem.distributions().size());
  parallel_for(static_cast<std::ptrdiff_t>(s.plans.size()), [&](std::ptrdiff_t t) {
    const DiscreteDistribution& p = problem[t];
    s.plans[t] = solve_transport({cost_matrix(s.x, p), s.w, p.weights()}).plan;
  });
  return s;
}

}  // namespace

std::vector<Index> assign(const std::vector<DiscreteDistribution>& data,
                          const std::vector<Centroid>& centroids, std::vector<double>* distances) {
  if (centroids.empty()) throw InvalidArgument("assign: no centroids");
  const auto n = static_cast<std::ptrdiff_t>(data.size());
  const auto k = static_cast<Index>(centroids.size());
  Matrix dist(k, n);
  parallel_for(n * k, [&](std::ptrdiff_t idx) {
    const Index t = idx / k;
    const Index s = idx % k;
    dist(s, t) = w2_squared(centroids[s].weights, centroids[s].support, data[t]);
  });
  std::vector<Index> labels(n);
  if (distances) distances->assign(n, 0.0);
  for (std::ptrdiff_t t = 0; t < n; ++t) {
    Index best = 0;
    for (Index s = 1; s < k; ++s) {
      if (dist(s, t) < dist(best, t)) best = s;
    }
    labels[t] = best;
    if (distances) (*distances)[t] = dist(best, t);
  }
  return labels;
}

std::vector<Index> seed_centroids(const std::vector<DiscreteDistribution>& data, Index k,
                                  std::uint64_t seed) {
  const auto n = static_cast<Index>(data.size());
  if (k < 1 || k > n) throw InvalidArgument("seed_centroids needs 1 <= K <= N");
  Rng rng(seed);
  std::vector<Index> chosen{static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)))};
  std::vector<char> taken(n, 0);
  taken[chosen[0]] = 1;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  while (static_cast<Index>(chosen.size()) < k) {
    const DiscreteDistribution& last = data[chosen.back()];
    std::vector<double> d(n);
    parallel_for(n, [&](std::ptrdiff_t t) { d[t] = taken[t] ? 0.0 : w2_squared(last, data[t]); });
    double total = 0.0;
    for (Index t = 0; t < n; ++t) {
      nearest[t] = taken[t] ? 0.0 : std::min(nearest[t], d[t]);
      total += nearest[t];
    }
    Index pick = -1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Index t = 0; t < n; ++t) {
        if (taken[t] || nearest[t] <= 0.0) continue;
        pick = t;
        target -= nearest[t];
        if (target < 0.0) break;
      }
    } else {
      // Every remaining datum coincides with a chosen one: pick uniformly.
      std::vector<Index> rest;
      for (Index t = 0; t < n; ++t) {
        if (!taken[t]) rest.push_back(t);
      }
      pick = rest[rng.below(rest.size())];
    }
    taken[pick] = 1;
    chosen.push_back(pick);
  }
  return chosen;
}

ClusterModel d2_cluster(const std::vector<DiscreteDistribution>& data, const ClusterConfig& config) {
  const auto n = static_cast<Index>(data.size());
  const Index k = config.k;
  if (k < 1 || k > n) throw InvalidArgument("d2_cluster needs 1 <= K <= N");
  if (config.max_rounds < 1) throw InvalidArgument("d2_cluster needs max_rounds >= 1");
  if (config.m < 1) throw InvalidArgument("d2_cluster needs m >= 1");

  ClusterModel model;
  for (Index idx : seed_centroids(data, k, config.seed)) {
    model.centroids.push_back(to_centroid(data[idx]));
  }
  model.assignments = assign(data, model.centroids, &model.distances);

  for (long round = 1; round <= config.max_rounds; ++round) {
    model.rounds = round;

    // Re-seed empty clusters with the farthest datum of a cluster that can spare it.
    std::vector<Index> sizes(k, 0);
    for (Index l : model.assignments) ++sizes[l];
    for (Index s = 0; s < k; ++s) {
      if (sizes[s] > 0) continue;
      Index far = -1;
      for (Index t = 0; t < n; ++t) {
        if (sizes[model.assignments[t]] < 2) continue;
        if (far < 0 || model.distances[t] > model.distances[far]) far = t;
      }
      --sizes[model.assignments[far]];
      ++sizes[s];
      model.assignments[far] = s;
      model.distances[far] = 0.0;
      model.centroids[s] = to_centroid(data[far]);
    }

    // Optimization step: one barycenter per cluster.
    std::vector<Centroid> updated(k);
    for (Index s = 0; s < k; ++s) {
      std::vector<DiscreteDistribution> members;
      for (Index t = 0; t < n; ++t) {
        if (model.assignments[t] == s) members.push_back(data[t]);
      }
      PamConfig pam = config.pam;
      pam.seed = derive_seed(config.seed, static_cast<std::uint64_t>(round * k + s));
      const BarycenterProblem problem(std::move(members), config.m);
      const PamResult solved =
          solve_barycenter(problem, pam, centroid_start(model.centroids[s], problem));
      updated[s] = {solved.state.w, solved.state.x};
    }
    model.centroids = std::move(updated);

    // Assignment step.
    std::vector<Index> labels = assign(data, model.centroids, &model.distances);
    const bool changed = labels != model.assignments;
    model.assignments = std::move(labels);
    if (!changed) {
      model.converged = true;
      break;
    }
  }

  model.objective = 0.0;
  for (double d : model.distances) model.objective += d;
  return model;
}

}  // namespace wbary
