#pragma once

#include <limits>
#include <vector>

#include "pdmp/chains.hpp"

namespace pdmp {

enum class KernelShape { kEpanechnikov, kTriangular, kUniform };

/// Smoothing kernel K(u) on [-1, 1], normalized to integrate to 1.
double kernel_weight(KernelShape shape, double u);

/// Closed interval for the set A; the query point's neighbourhood.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Partition block: [lo, hi) except the last block of a partition, which is
/// closed on the right so the blocks cover the observed range exactly.
struct Block {
  double lo = 0.0;
  double hi = 0.0;
  bool closed_hi = false;
  bool contains(double v) const {
    return v >= lo && (closed_hi ? v <= hi : v < hi);
  }
};

struct Partition {
  Interval set_a;
  std::vector<Block> blocks;  // pairwise disjoint, cover the post-jump range
};

/// The transitions (Z_i, Z_{i+1}, S_{i+1}) of a 1-D embedded chain; the
/// estimators depend on the chain only through this multiset.
struct TransitionSample {
  std::vector<double> z_from;
  std::vector<double> z_to;
  std::vector<double> s;

  static TransitionSample from_chain(const EmbeddedChain& chain);
  std::size_t size() const { return s.size(); }
};

/// A = the a_width interval centred at x, clipped to stay strictly inside
/// (domain_lo, domain_hi); blocks = k_blocks empirical quantile intervals
/// of the post-jump locations of transitions starting in A.
Partition build_partition(const EmbeddedChain& chain, double x, double a_width,
                          int k_blocks, double domain_lo = 0.0,
                          double domain_hi = std::numeric_limits<double>::infinity());

/// Empirical H(A, B, t): #{Z_i in A, Z_{i+1} in B, S_{i+1} > t} over
/// #{Z_i in A}.
double estimate_H(const EmbeddedChain& chain, const Interval& set_a,
                  const Block& block, double t);
double estimate_H(const TransitionSample& transitions, const Interval& set_a,
                  const Block& block, double t);

/// Kernel-smoothed hazard of the inter-jump time for transitions from A
/// into B, in the multiplicative-intensity form: each event S_i contributes
/// K((t - S_i)/b) / (b * Y(S_i)) with Y(s) the number of A-to-B transitions
/// still at risk (S >= s). Grid points with nothing at risk get value 0.
struct HazardEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0.0;
  KernelShape kernel_shape = KernelShape::kEpanechnikov;
  bool no_events = false;  // no transitions from A landed in this block
};

HazardEstimate estimate_l(const EmbeddedChain& chain, const Interval& set_a,
                          const Block& block, const std::vector<double>& grid,
                          double bandwidth, KernelShape shape);
HazardEstimate estimate_l(const TransitionSample& transitions, const Interval& set_a,
                          const Block& block, const std::vector<double>& grid,
                          double bandwidth, KernelShape shape);

/// f_hat(x, t) = sum_k l_hat(A, B_k, t) * H_hat(A, B_k, t) on the grid.
struct DensityEstimate {
  double x = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::size_t n_used = 0;  // transitions starting in A
};

DensityEstimate estimate_density(const EmbeddedChain& chain, double x,
                                 const Partition& partition,
                                 const std::vector<double>& grid,
                                 double bandwidth, KernelShape shape);

/// Default bandwidth: n^(-1/5) scaled by the standard deviation of the
/// inter-jump times of the transitions starting in A.
double default_bandwidth(const TransitionSample& transitions, const Interval& set_a);

}  // namespace pdmp
