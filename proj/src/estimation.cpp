#include "pdmp/estimation.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/errors.hpp"
#include "pdmp/stats.hpp"

namespace pdmp {

double kernel_weight(KernelShape shape, double u) {
  const double a = std::abs(u);
  if (a >= 1.0) return 0.0;
  switch (shape) {
    case KernelShape::kEpanechnikov:
      return 0.75 * (1.0 - u * u);
    case KernelShape::kTriangular:
      return 1.0 - a;
    case KernelShape::kUniform:
    default:
      return 0.5;
  }
}

TransitionSample TransitionSample::from_chain(const EmbeddedChain& chain) {
  TransitionSample t;
  if (chain.entries.empty()) return t;
  for (const auto& entry : chain.entries) {
    if (entry.z.size() != 1) {
      throw Error("estimation: 1-D chains only");
    }
  }
  const std::size_t n = chain.entries.size();
  t.z_from.reserve(n - 1);
  t.z_to.reserve(n - 1);
  t.s.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    t.z_from.push_back(chain.entries[i].z[0]);
    t.z_to.push_back(chain.entries[i + 1].z[0]);
    t.s.push_back(chain.entries[i + 1].s);
  }
  return t;
}

Partition build_partition(const EmbeddedChain& chain, double x, double a_width,
                          int k_blocks, double domain_lo, double domain_hi) {
  if (!(a_width > 0.0)) throw Error("build_partition: a_width must be positive");
  if (k_blocks < 1) throw Error("build_partition: k_blocks must be >= 1");
  const TransitionSample transitions = TransitionSample::from_chain(chain);
  if (static_cast<int>(transitions.size()) < k_blocks) {
    throw InsufficientDataError("build_partition: fewer transitions than blocks");
  }

  Partition p;
  // Clip A so its closure stays away from the domain boundary.
  const double margin = 1e-9 * std::max(1.0, std::abs(x)) ;
  p.set_a.lo = std::max(x - 0.5 * a_width, domain_lo + margin);
  p.set_a.hi = std::min(x + 0.5 * a_width, domain_hi - margin);
  if (!(p.set_a.lo < p.set_a.hi)) {
    throw Error("build_partition: A collapsed after clipping to the domain");
  }

  std::vector<double> destinations;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (p.set_a.contains(transitions.z_from[i])) {
      destinations.push_back(transitions.z_to[i]);
    }
  }
  if (destinations.size() < 20) {
    throw InsufficientDataError(
        "build_partition: fewer than 20 transitions start in A (" +
        std::to_string(destinations.size()) + ")");
  }
  if (destinations.size() < static_cast<std::size_t>(k_blocks)) {
    throw InsufficientDataError("build_partition: not enough destinations for blocks");
  }

  std::sort(destinations.begin(), destinations.end());
  const std::size_t n = destinations.size();
  std::vector<double> edges;
  edges.push_back(destinations.front());
  for (int j = 1; j < k_blocks; ++j) {
    const std::size_t c = static_cast<std::size_t>(j) * n /
                          static_cast<std::size_t>(k_blocks);
    edges.push_back(0.5 * (destinations[c - 1] + destinations[c]));
  }
  edges.push_back(destinations.back());

  p.blocks.reserve(static_cast<std::size_t>(k_blocks));
  for (int j = 0; j < k_blocks; ++j) {
    Block b;
    b.lo = edges[static_cast<std::size_t>(j)];
    b.hi = edges[static_cast<std::size_t>(j) + 1];
    b.closed_hi = (j == k_blocks - 1);
    p.blocks.push_back(b);
  }
  return p;
}

double estimate_H(const TransitionSample& transitions, const Interval& set_a,
                  const Block& block, double t) {
  std::size_t denom = 0, numer = 0;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (!set_a.contains(transitions.z_from[i])) continue;
    ++denom;
    if (block.contains(transitions.z_to[i]) && transitions.s[i] > t) ++numer;
  }
  if (denom == 0) {
    throw InsufficientDataError("estimate_H: no transitions start in A");
  }
  return static_cast<double>(numer) / static_cast<double>(denom);
}

double estimate_H(const EmbeddedChain& chain, const Interval& set_a,
                  const Block& block, double t) {
  return estimate_H(TransitionSample::from_chain(chain), set_a, block, t);
}

HazardEstimate estimate_l(const TransitionSample& transitions, const Interval& set_a,
                          const Block& block, const std::vector<double>& grid,
                          double bandwidth, KernelShape shape) {
  if (!(bandwidth > 0.0)) throw Error("estimate_l: bandwidth must be positive");
  if (grid.empty()) throw Error("estimate_l: empty grid");

  std::size_t n_a = 0;
  std::vector<double> events;  // S of transitions from A into the block
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (!set_a.contains(transitions.z_from[i])) continue;
    ++n_a;
    if (block.contains(transitions.z_to[i])) events.push_back(transitions.s[i]);
  }
  if (n_a == 0) {
    throw InsufficientDataError("estimate_l: at-risk set is empty");
  }

  HazardEstimate est;
  est.grid = grid;
  est.bandwidth = bandwidth;
  est.kernel_shape = shape;
  est.values.assign(grid.size(), 0.0);
  if (events.empty()) {
    est.no_events = true;
    return est;
  }

  std::sort(events.begin(), events.end());
  const std::size_t m = events.size();
  // At-risk count at each event time (ties share the larger count).
  std::vector<double> inv_at_risk(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t first = i;
    while (first > 0 && events[first - 1] == events[i]) --first;
    inv_at_risk[i] = 1.0 / static_cast<double>(m - first);
  }

  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    const auto lo = std::lower_bound(events.begin(), events.end(), t - bandwidth);
    const auto hi = std::upper_bound(events.begin(), events.end(), t + bandwidth);
    double acc = 0.0;
    for (auto it = lo; it != hi; ++it) {
      const std::size_t i = static_cast<std::size_t>(it - events.begin());
      acc += kernel_weight(shape, (t - events[i]) / bandwidth) * inv_at_risk[i];
    }
    est.values[g] = acc / bandwidth;
  }
  return est;
}

HazardEstimate estimate_l(const EmbeddedChain& chain, const Interval& set_a,
                          const Block& block, const std::vector<double>& grid,
                          double bandwidth, KernelShape shape) {
  return estimate_l(TransitionSample::from_chain(chain), set_a, block, grid,
                    bandwidth, shape);
}

DensityEstimate estimate_density(const EmbeddedChain& chain, double x,
                                 const Partition& partition,
                                 const std::vector<double>& grid,
                                 double bandwidth, KernelShape shape) {
  const TransitionSample transitions = TransitionSample::from_chain(chain);
  DensityEstimate est;
  est.x = x;
  est.grid = grid;
  est.values.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (partition.set_a.contains(transitions.z_from[i])) ++est.n_used;
  }
  for (const Block& block : partition.blocks) {
    const HazardEstimate l_hat =
        estimate_l(transitions, partition.set_a, block, grid, bandwidth, shape);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (l_hat.values[g] == 0.0) continue;
      const double h_hat = estimate_H(transitions, partition.set_a, block, grid[g]);
      est.values[g] += l_hat.values[g] * h_hat;
    }
  }
  return est;
}

double default_bandwidth(const TransitionSample& transitions, const Interval& set_a) {
  std::vector<double> s_in_a;
  for (std::size_t i = 0; i < transitions.size(); ++i) {
    if (set_a.contains(transitions.z_from[i])) s_in_a.push_back(transitions.s[i]);
  }
  if (s_in_a.size() < 2) {
    throw InsufficientDataError("default_bandwidth: too few transitions in A");
  }
  const double n = static_cast<double>(s_in_a.size());
  return sample_stddev(s_in_a) * std::pow(n, -0.2);
}

}  // namespace pdmp
