#include "pdmp/chains.hpp"

#include <algorithm>
#include <cmath>

#include "pdmp/engine.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/quadrature.hpp"
#include "pdmp/roots.hpp"

namespace pdmp {

EmbeddedChain embedded_chain(const Trajectory& traj) {
  EmbeddedChain chain;
  chain.entries.reserve(traj.jump_count() + 1);
  chain.entries.push_back({traj.initial_state, 0.0});
  for (std::size_t k = 0; k < traj.jump_count(); ++k) {
    chain.entries.push_back({traj.post_jump_states[k], traj.inter_jump_times[k]});
  }
  return chain;
}

ObservationChain observation_chain(const Trajectory& traj, RandomStream& stream) {
  std::vector<double> obs_times;
  double t = stream.exponential(1.0);
  while (t <= traj.horizon) {
    obs_times.push_back(t);
    t += stream.exponential(1.0);
  }

  ObservationChain chain;
  chain.entries.reserve(obs_times.size() + traj.jump_count());
  std::size_t j = 0, o = 0;
  while (j < traj.jump_count() || o < obs_times.size()) {
    const bool take_jump =
        o >= obs_times.size() ||
        (j < traj.jump_count() && traj.jump_times[j] <= obs_times[o]);
    if (take_jump) {
      chain.entries.push_back(
          {traj.post_jump_states[j], traj.jump_times[j], ObservationOrigin::kJump});
      ++j;
    } else {
      chain.entries.push_back(
          {state_at(traj, obs_times[o]), obs_times[o], ObservationOrigin::kObservation});
      ++o;
    }
  }
  return chain;
}

IntervalSet IntervalSet::full() {
  IntervalSet s;
  s.full_ = true;
  return s;
}

IntervalSet IntervalSet::interval(double lo, double hi) {
  IntervalSet s;
  s.add(lo, hi);
  return s;
}

IntervalSet& IntervalSet::add(double lo, double hi) {
  if (!(lo <= hi)) throw Error("IntervalSet: reversed interval");
  pieces_.emplace_back(lo, hi);
  return *this;
}

bool IntervalSet::contains(double v) const {
  if (full_) return true;
  for (const auto& [lo, hi] : pieces_) {
    if (v >= lo && v <= hi) return true;
  }
  return false;
}

namespace {

constexpr double kKernelTol = 1e-8;
constexpr double kLogTailCutoff = 40.0;  // exp(-40) ~ 4e-18, far below tol

void require_1d(const LocalCharacteristics& chars) {
  if (chars.state_dim != 1) {
    throw Error("kernel sweeps are implemented for 1-D state spaces only");
  }
}

double q_mass(const LocalCharacteristics& chars, const State& z,
              const IntervalSet& set) {
  if (set.is_full()) return 1.0;
  if (!chars.transition_interval_mass) {
    throw Error("kernel_J_mass: characteristics lack transition_interval_mass");
  }
  double acc = 0.0;
  for (const auto& [lo, hi] : set.pieces()) {
    acc += chars.transition_interval_mass(z, lo, hi);
  }
  return acc;
}

// Upper integration limit: the boundary time if it comes first, else the
// point where s + Lambda(x, s) reaches the log tail cutoff.
double integration_limit(const LocalCharacteristics& chars, const State& x,
                         double tstar) {
  if (tstar <= 0.0) return 0.0;
  const double cap = std::min(tstar, kLogTailCutoff);
  const double at_cap = cap + cumulative_hazard(chars, x, cap);
  if (at_cap <= kLogTailCutoff) return cap;  // boundary first (or cap == cutoff)
  return find_root(
      [&](double s) { return s + cumulative_hazard(chars, x, s) - kLogTailCutoff; },
      0.0, cap, 1e-12);
}

// Splits [0, upper] at the discontinuities of `weight` (detected on a scan
// grid and refined by bisection), so each quadrature piece sees a smooth
// integrand.
std::vector<double> split_at_weight_jumps(const std::function<double(double)>& weight,
                                          double upper) {
  constexpr int kScan = 1024;
  std::vector<double> cuts;
  cuts.push_back(0.0);
  double prev_s = 0.0;
  double prev_w = weight(0.0);
  for (int i = 1; i <= kScan; ++i) {
    const double s = upper * static_cast<double>(i) / kScan;
    const double w = weight(s);
    if (w != prev_w) {
      double lo = prev_s, hi = s;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (weight(mid) == prev_w) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      cuts.push_back(lo);
      cuts.push_back(hi);
    }
    prev_s = s;
    prev_w = w;
  }
  cuts.push_back(upper);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double integrate_pieces(const std::function<double(double)>& f,
                        const std::vector<double>& cuts) {
  const double tol = kKernelTol / static_cast<double>(cuts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    acc += integrate(f, cuts[i], cuts[i + 1], tol);
  }
  return acc;
}

}  // namespace

double kernel_H_mass(const LocalCharacteristics& chars, const State& x,
                     const IntervalSet& set) {
  require_1d(chars);
  const double tstar = boundary_time(chars, x);
  const double upper = integration_limit(chars, x, tstar);
  if (upper <= 0.0) return 0.0;

  auto indicator = [&](double s) {
    return set.contains(flow_at(chars, x, s)[0]) ? 1.0 : 0.0;
  };
  auto integrand = [&](double s) {
    const double ind = indicator(s);
    if (ind == 0.0) return 0.0;
    return std::exp(-(s + cumulative_hazard(chars, x, s)));
  };
  const auto cuts = set.is_full() ? std::vector<double>{0.0, upper}
                                  : split_at_weight_jumps(indicator, upper);
  return integrate_pieces(integrand, cuts);
}

double kernel_J_mass(const LocalCharacteristics& chars, const State& x,
                     const IntervalSet& set) {
  require_1d(chars);
  const double tstar = boundary_time(chars, x);
  const double upper = integration_limit(chars, x, tstar);

  auto weight = [&](double s) { return q_mass(chars, flow_at(chars, x, s), set); };
  auto integrand = [&](double s) {
    const double w = weight(s);
    if (w == 0.0) return 0.0;
    const State phi = flow_at(chars, x, s);
    return chars.jump_rate(phi) * std::exp(-(s + cumulative_hazard(chars, x, s))) * w;
  };

  double total = 0.0;
  if (upper > 0.0) {
    const auto cuts = set.is_full() ? std::vector<double>{0.0, upper}
                                    : split_at_weight_jumps(weight, upper);
    total = integrate_pieces(integrand, cuts);
  }
  if (std::isfinite(tstar) && tstar <= upper + 1e-12) {
    const State exit_point = flow_at(chars, x, tstar);
    total += std::exp(-(tstar + cumulative_hazard(chars, x, tstar))) *
             q_mass(chars, exit_point, set);
  }
  return total;
}

double check_markov_kernel(const LocalCharacteristics& chars, const State& x) {
  const double h = kernel_H_mass(chars, x, IntervalSet::full());
  const double j = kernel_J_mass(chars, x, IntervalSet::full());
  return std::abs(h + j - 1.0);
}

}  // namespace pdmp
