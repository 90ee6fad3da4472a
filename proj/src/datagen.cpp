#include "wbary/datagen.hpp"

#include <charconv>
#include <limits>
#include <optional>
#include <sstream>

#include "wbary/parallel.hpp"
#include "wbary/rng.hpp"

namespace wbary {
namespace {

void check_counts(const GenSpec& spec) {
  if (spec.count < 1 || spec.dim < 1) throw InvalidArgument("generator needs N >= 1 and d >= 1");
}

Index parse_index(const std::string& s) {
  Index v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("not an integer: '" + s + "'");
  return v;
}

Vector dirichlet_flat(Rng& rng, Index n) {
  Vector g(n);
  for (Index j = 0; j < n; ++j) g[j] = rng.exponential();
  return g;
}

DiscreteDistribution mvn_t_distribution(const GenSpec& spec, Index t, Index nt) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(t)));
  const Index d = spec.dim;
  Vector mean(d);
  for (Index c = 0; c < d; ++c) mean[c] = rng.uniform(spec.mean_lo, spec.mean_hi);
  Matrix support(nt, d);
  for (Index j = 0; j < nt; ++j) {
    for (Index c = 0; c < d; ++c) {
      support(j, c) = mean[c] + rng.normal() + spec.noise_scale * rng.student_t(3);
    }
  }
  return DiscreteDistribution::from_masses(std::move(support), dirichlet_flat(rng, nt));
}

DiscreteDistribution color_distribution(const GenSpec& spec, Index t) {
  Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(t)));
  constexpr Index kComponents = 3;
  constexpr double kPixelNoise = 8.0;
  Matrix centers(kComponents, 3);
  for (Index c = 0; c < kComponents; ++c) {
    for (Index ch = 0; ch < 3; ++ch) centers(c, ch) = rng.uniform(0.0, 255.0);
  }
  Vector mix = dirichlet_flat(rng, kComponents);
  mix /= mix.sum();

  Matrix pixels(spec.pixels, 3);
  for (Index p = 0; p < spec.pixels; ++p) {
    double u = rng.uniform();
    Index c = 0;
    while (c < kComponents - 1 && u >= mix[c]) u -= mix[c++];
    for (Index ch = 0; ch < 3; ++ch) pixels(p, ch) = centers(c, ch) + kPixelNoise * rng.normal();
  }

  // Lloyd iterations from k distinct random pixels.
  const Index k = std::min(spec.nt, spec.pixels);
  std::vector<Index> order(spec.pixels);
  for (Index p = 0; p < spec.pixels; ++p) order[p] = p;
  for (Index i = 0; i < k; ++i) {
    std::swap(order[i], order[i + static_cast<Index>(rng.below(spec.pixels - i))]);
  }
  Matrix means(k, 3);
  for (Index i = 0; i < k; ++i) means.row(i) = pixels.row(order[i]);
  std::vector<Index> label(spec.pixels, 0);
  Vector counts(k);
  for (Index iter = 0; iter <= spec.kmeans_iterations; ++iter) {
    for (Index p = 0; p < spec.pixels; ++p) {
      double best = std::numeric_limits<double>::infinity();
      for (Index i = 0; i < k; ++i) {
        const double dist = (pixels.row(p) - means.row(i)).squaredNorm();
        if (dist < best) {
          best = dist;
          label[p] = i;
        }
      }
    }
    if (iter == spec.kmeans_iterations) break;
    Matrix sums = Matrix::Zero(k, 3);
    counts.setZero();
    for (Index p = 0; p < spec.pixels; ++p) {
      sums.row(label[p]) += pixels.row(p);
      counts[label[p]] += 1.0;
    }
    for (Index i = 0; i < k; ++i) {
      if (counts[i] > 0.0) means.row(i) = sums.row(i) / counts[i];
    }
  }
  counts.setZero();
  for (Index p = 0; p < spec.pixels; ++p) counts[label[p]] += 1.0;
  const Index occupied = (counts.array() > 0.0).count();
  Matrix support(occupied, 3);
  Vector masses(occupied);
  for (Index i = 0, o = 0; i < k; ++i) {
    if (counts[i] > 0.0) {
      support.row(o) = means.row(i);
      masses[o++] = counts[i];
    }
  }
  return DiscreteDistribution::from_masses(std::move(support), std::move(masses));
}

template <class Make>
std::vector<DiscreteDistribution> build(Index count, Make make) {
  std::vector<std::optional<DiscreteDistribution>> slots(count);
  parallel_for(count, [&](std::ptrdiff_t t) { slots[t].emplace(make(static_cast<Index>(t))); });
  std::vector<DiscreteDistribution> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace

Family parse_family(const std::string& name) {
  if (name == "mvn-t") return Family::kMvnT;
  if (name == "colors") return Family::kColors;
  if (name == "varied-nt") return Family::kVariedNt;
  throw InvalidArgument("unknown family '" + name + "' (expected mvn-t, colors or varied-nt)");
}

std::string family_name(Family family) {
  switch (family) {
    case Family::kMvnT:
      return "mvn-t";
    case Family::kColors:
      return "colors";
    case Family::kVariedNt:
      return "varied-nt";
  }
  return "unknown";
}

std::vector<Index> parse_grid(const std::string& text) {
  std::vector<Index> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw InvalidArgument("range must look like start:step:stop");
    const Index start = parse_index(parts[0]);
    const Index step = parse_index(parts[1]);
    const Index stop = parse_index(parts[2]);
    if (step <= 0) throw InvalidArgument("range step must be positive");
    for (Index v = start; v <= stop; v += step) out.push_back(v);
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(parse_index(p));
  }
  if (out.empty()) throw InvalidArgument("empty support-size grid '" + text + "'");
  for (Index v : out) {
    if (v < 1) throw InvalidArgument("support sizes must be positive");
  }
  return out;
}

std::vector<DiscreteDistribution> gen_mvn_t(const GenSpec& spec) {
  check_counts(spec);
  if (spec.nt < 1) throw InvalidArgument("generator needs n_t >= 1");
  return build(spec.count, [&](Index t) { return mvn_t_distribution(spec, t, spec.nt); });
}

std::vector<DiscreteDistribution> gen_colors(const GenSpec& spec) {
  check_counts(spec);
  if (spec.dim != 3) throw InvalidArgument("colors family is three-dimensional (d = 3)");
  if (spec.nt < 1 || spec.pixels < 1) throw InvalidArgument("colors family needs n_t, pixels >= 1");
  return build(spec.count, [&](Index t) { return color_distribution(spec, t); });
}

std::vector<DiscreteDistribution> gen_varied_nt(const GenSpec& spec) {
  check_counts(spec);
  if (spec.nt_grid.empty()) throw InvalidArgument("varied-nt family needs a support-size grid");
  const auto g = static_cast<Index>(spec.nt_grid.size());
  return build(spec.count,
               [&](Index t) { return mvn_t_distribution(spec, t, spec.nt_grid[t % g]); });
}

std::vector<DiscreteDistribution> generate(const GenSpec& spec) {
  switch (spec.family) {
    case Family::kMvnT:
      return gen_mvn_t(spec);
    case Family::kColors:
      return gen_colors(spec);
    case Family::kVariedNt:
      return gen_varied_nt(spec);
  }
  throw InvalidArgument("unknown family");
}

}  // namespace wbary
