#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pdmp/random.hpp"

namespace pdmp {

/// Two TCP paths evolved under the joint dynamics: both drift at unit
/// speed, halve together at the rate of the lower coordinate, and the
/// higher one halves alone at a rate equal to the gap. Each marginal is an
/// ordinary TCP process; the diagonal is absorbing.
struct CoupledPath {
  double x0 = 0.0, y0 = 0.0;
  std::vector<double> times;                       // event times, increasing
  std::vector<std::pair<double, double>> states;   // (x, y) after each event
  std::vector<double> gaps;    // |x - y| after each event; halves exactly at
                               // simultaneous events
  std::vector<bool> simultaneous;
  std::optional<double> coalesced_at;
  double horizon = 0.0;
};

CoupledPath simulate_pair(double x, double y, double horizon, RandomStream& stream);

/// (x, y) at time t in [0, horizon]; right continuous at events.
std::pair<double, double> pair_at(const CoupledPath& path, double t);

struct StickingResult {
  bool success = false;
  std::optional<double> coalescence_time;
};

/// One-shot attempt to put two TCP paths (gap delta = |x - y|) on the same
/// point at the first jump of the higher one: the first jump time from the
/// higher point is maximally coupled with the delta-shifted first jump time
/// from the lower one, and the attempt succeeds when the coupled times
/// match and the lower path's second inter-jump clock exceeds delta.
StickingResult sticking_attempt(double x, double y, RandomStream& stream);

struct CompositeCouplingConfig {
  double lambda_tilde_factor = 0.9;   // lambda_tilde / lambda
  double phase2_window_factor = 1.0;  // phase-2 window = factor*sqrt(log(1/eps))
  double epsilon = 0.05;              // gap target used by estimate_tv_upper
};

struct CompositeResult {
  bool coalesced = false;
  std::optional<double> time;
};

/// Alternates the dynamical coupling (for time log(1/eps)/lambda_tilde, to
/// bring the gap below eps) with sticking attempts, restarting from the
/// current pair state after every failure, until coalescence or `horizon`.
CompositeResult composite_tv_coupling(double x, double y, double epsilon,
                                      double horizon, RandomStream& stream,
                                      const CompositeCouplingConfig& config = {});

/// Exact W_p between two equal-length 1-D samples via sorted matching.
/// p >= 1 applies the outer 1/p root; p = 1/2 returns the plain average of
/// square-rooted gaps (the contraction functional, not a metric).
double empirical_wasserstein(std::vector<double> a, std::vector<double> b, double p);

/// Coalescence times of n composite couplings on streams (seed, index);
/// entries without a value did not coalesce by `horizon`.
std::vector<std::optional<double>> coalescence_times(
    double x, double y, double horizon, std::size_t n, std::uint64_t seed,
    const CompositeCouplingConfig& config = {});

/// Fraction of n_pairs composite couplings not coalesced by t: a consistent
/// upper-bound estimator of the total variation distance between the
/// time-t laws from x and from y.
double estimate_tv_upper(double x, double y, double t, std::size_t n_pairs,
                         std::uint64_t seed,
                         const CompositeCouplingConfig& config = {});

struct RateFit {
  double rate = 0.0;       // negated slope of ln(value) against time
  double intercept = 0.0;  // fitted ln(value) at t = 0
  double t_min = 0.0;
  double t_max = 0.0;
  double residual_rms = 0.0;
};

/// Ordinary least squares of ln(values) on times; values must be positive.
RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace pdmp
