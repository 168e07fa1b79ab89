#include "pdmp/switching.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "pdmp/engine.hpp"
#include "pdmp/errors.hpp"

namespace pdmp {
namespace {

constexpr double kContainmentSlack = 1e-6;

bool strongly_connected(const std::vector<std::vector<bool>>& adj) {
  const int n = static_cast<int>(adj.size());
  auto all_reachable_from_0 = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < n; ++v) {
        const bool edge = transpose ? adj[v][u] : adj[u][v];
        if (edge && !seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return all_reachable_from_0(false) && all_reachable_from_0(true);
}

void validate(const SwitchingModel& m) {
  if (m.d < 1) throw Error("switching model: dimension must be >= 1");
  if (m.n_modes < 2) throw Error("switching model: need at least two modes");
  if (static_cast<int>(m.fields.size()) != m.n_modes) {
    throw Error("switching model: one vector field per mode required");
  }
  for (const auto& f : m.fields) {
    if (!f) throw Error("switching model: null vector field");
  }
  if (!m.rates) throw Error("switching model: no rate function");
  if (!(m.rate_bound > 0.0)) throw Error("switching model: rate_bound must be positive");
  if (static_cast<int>(m.k_lo.size()) != m.d ||
      static_cast<int>(m.k_hi.size()) != m.d) {
    throw Error("switching model: invariant box must match the dimension");
  }
  for (int k = 0; k < m.d; ++k) {
    if (!(m.k_lo[k] < m.k_hi[k])) {
      throw Error("switching model: invariant box has empty extent");
    }
  }
  if (!(m.ode_step > 0.0)) throw Error("switching model: ode_step must be positive");

  // Probe the rate matrix at sampled points of K: zero diagonal, pattern
  // irreducible, declared bound respected.
  RandomStream probe(0x9E3779B97F4A7C15ULL, 11);
  State y(m.d);
  for (int sample = 0; sample < 100; ++sample) {
    for (int k = 0; k < m.d; ++k) y[k] = probe.uniform(m.k_lo[k], m.k_hi[k]);
    std::vector<std::vector<bool>> adj(m.n_modes, std::vector<bool>(m.n_modes, false));
    for (int i = 0; i < m.n_modes; ++i) {
      double total = 0.0;
      for (int j = 0; j < m.n_modes; ++j) {
        const double rate = m.rates(i, j, y);
        if (i == j) {
          if (rate != 0.0) throw Error("switching model: lambda_ii must be 0");
          continue;
        }
        if (!(rate >= 0.0)) throw Error("switching model: negative jump rate");
        adj[i][j] = rate > 0.0;
        total += rate;
      }
      if (total > m.rate_bound * (1.0 + 1e-9)) {
        throw RateBoundError("switching model: total rate " + std::to_string(total) +
                             " exceeds declared bound at a sampled point of K");
      }
    }
    if (!strongly_connected(adj)) {
      throw Error("switching model: rate pattern is reducible inside K");
    }
  }
}

State position_of(const State& x, int d) {
  return State(x.begin(), x.begin() + d);
}

void check_in_box(const State& y, const State& lo, const State& hi) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    if (y[k] < lo[k] - kContainmentSlack || y[k] > hi[k] + kContainmentSlack) {
      throw Error("switching model: trajectory left the invariant set K");
    }
  }
}

}  // namespace

int switching_mode(const State& x) {
  return static_cast<int>(std::llround(x.back()));
}

State switching_state(const State& y, int mode) {
  State x = y;
  x.push_back(static_cast<double>(mode));
  return x;
}

LocalCharacteristics switching_characteristics(const SwitchingModel& model) {
  validate(model);
  auto m = std::make_shared<const SwitchingModel>(model);

  LocalCharacteristics chars;
  chars.state_dim = m->d + 1;
  chars.ode_step = m->ode_step;
  chars.rate_bound = m->rate_bound;

  chars.ode_rhs = [m](const State& x, State& dx) {
    const int mode = switching_mode(x);
    if (mode < 0 || mode >= m->n_modes) {
      throw Error("switching model: mode coordinate out of range");
    }
    const State y = position_of(x, m->d);
    State dy(m->d);
    m->fields[static_cast<std::size_t>(mode)](y, dy);
    std::copy(dy.begin(), dy.end(), dx.begin());
    dx.back() = 0.0;  // the mode is frozen between jumps
  };

  chars.jump_rate = [m](const State& x) {
    const int mode = switching_mode(x);
    const State y = position_of(x, m->d);
    check_in_box(y, m->k_lo, m->k_hi);
    double total = 0.0;
    for (int j = 0; j < m->n_modes; ++j) {
      if (j == mode) continue;
      total += m->rates(mode, j, y);
    }
    return total;
  };

  chars.transition_sampler = [m](const State& x, RandomStream& stream) {
    const int mode = switching_mode(x);
    const State y = position_of(x, m->d);
    double total = 0.0;
    std::vector<double> weights(m->n_modes, 0.0);
    for (int j = 0; j < m->n_modes; ++j) {
      if (j == mode) continue;
      weights[j] = m->rates(mode, j, y);
      total += weights[j];
    }
    if (!(total > 0.0)) {
      throw Error("switching model: transition sampled at a zero-rate point");
    }
    const double u = stream.uniform() * total;
    double acc = 0.0;
    int target = -1;
    for (int j = 0; j < m->n_modes; ++j) {
      acc += weights[j];
      if (u < acc) {
        target = j;
        break;
      }
    }
    if (target < 0) target = mode == m->n_modes - 1 ? m->n_modes - 2 : m->n_modes - 1;
    State next = x;
    next.back() = static_cast<double>(target);
    return next;
  };

  return chars;
}

double OccupancyHistogram::mode_mass(int mode) const {
  double acc = 0.0;
  for (double v : mass[static_cast<std::size_t>(mode)]) acc += v;
  return acc;
}

double OccupancyHistogram::mass_outside(int dim, double lo_bound,
                                        double hi_bound) const {
  // Row-major flat index: stride of `dim` is the product of later bin counts.
  std::size_t stride = 1;
  for (std::size_t k = static_cast<std::size_t>(dim) + 1; k < bins.size(); ++k) {
    stride *= static_cast<std::size_t>(bins[k]);
  }
  const double w = bin_width(dim);
  double acc = 0.0;
  for (const auto& mode_mass_vec : mass) {
    for (std::size_t flat = 0; flat < mode_mass_vec.size(); ++flat) {
      const std::size_t idx = (flat / stride) % static_cast<std::size_t>(bins[dim]);
      const double bin_lo = lo[dim] + static_cast<double>(idx) * w;
      const double bin_hi = bin_lo + w;
      if (bin_hi < lo_bound || bin_lo > hi_bound) acc += mode_mass_vec[flat];
    }
  }
  return acc;
}

OccupancyHistogram occupancy_histogram(const SwitchingModel& model,
                                       const State& x0, double horizon,
                                       double burn_in,
                                       const std::vector<int>& bins,
                                       RandomStream& stream) {
  if (bins.empty() || static_cast<int>(bins.size()) != model.d) {
    throw Error("occupancy_histogram: need one bin count per position dimension");
  }
  for (int b : bins) {
    if (b < 1) throw Error("occupancy_histogram: bin counts must be >= 1");
  }
  if (!(burn_in >= 0.0) || !(burn_in < horizon)) {
    throw Error("occupancy_histogram: need 0 <= burn_in < horizon");
  }

  const LocalCharacteristics chars = switching_characteristics(model);
  const Trajectory traj = simulate(chars, x0, horizon, stream);

  OccupancyHistogram hist;
  hist.lo = model.k_lo;
  hist.hi = model.k_hi;
  hist.bins = bins;
  hist.n_modes = model.n_modes;
  std::size_t n_cells = 1;
  for (int b : bins) n_cells *= static_cast<std::size_t>(b);
  hist.mass.assign(static_cast<std::size_t>(model.n_modes),
                   std::vector<double>(n_cells, 0.0));

  double min_width = hist.bin_width(0);
  for (int k = 1; k < model.d; ++k) min_width = std::min(min_width, hist.bin_width(k));
  const double dt = std::min(0.01, min_width / 4.0);

  Rk4Stepper stepper(static_cast<std::size_t>(model.d) + 1);
  std::size_t total_samples = 0;
  double tau = burn_in + 0.5 * dt;

  const std::size_t n_segments = traj.jump_count() + 1;
  for (std::size_t seg = 0; seg < n_segments && tau <= horizon; ++seg) {
    const double t0 = seg == 0 ? 0.0 : traj.jump_times[seg - 1];
    const double t1 = seg == traj.jump_count() ? horizon : traj.jump_times[seg];
    if (t1 <= tau) continue;
    State cur = seg == 0 ? traj.initial_state : traj.post_jump_states[seg - 1];
    double cur_t = t0;
    while (tau < t1 && tau <= horizon) {
      stepper.advance(chars.ode_rhs, cur, tau - cur_t, chars.ode_step);
      cur_t = tau;
      const int mode = switching_mode(cur);
      std::size_t flat = 0;
      for (int k = 0; k < model.d; ++k) {
        const double w = hist.bin_width(k);
        const double y = cur[static_cast<std::size_t>(k)];
        if (y < model.k_lo[k] - kContainmentSlack ||
            y > model.k_hi[k] + kContainmentSlack) {
          throw Error("occupancy_histogram: sample left the invariant set K");
        }
        long idx = static_cast<long>(std::floor((y - model.k_lo[k]) / w));
        idx = std::clamp(idx, 0L, static_cast<long>(bins[k]) - 1L);
        flat = flat * static_cast<std::size_t>(bins[k]) + static_cast<std::size_t>(idx);
      }
      hist.mass[static_cast<std::size_t>(mode)][flat] += 1.0;
      ++total_samples;
      tau += dt;
    }
  }
  if (total_samples == 0) {
    throw Error("occupancy_histogram: no samples inside [burn_in, horizon]");
  }
  for (auto& mode_mass_vec : hist.mass) {
    for (double& v : mode_mass_vec) v /= static_cast<double>(total_samples);
  }
  return hist;
}

}  // namespace pdmp
