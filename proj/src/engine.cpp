#include "pdmp/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pdmp/quadrature.hpp"
#include "pdmp/roots.hpp"

namespace pdmp {
namespace {

constexpr double kMaxSearchTime = 1e12;  // "no jump" horizon for open-ended draws
constexpr double kBoundarySlack = 1e-9;

void check_finite(const State& x, const char* where) {
  for (double v : x) {
    if (!std::isfinite(v)) throw Error(std::string(where) + ": non-finite state");
  }
}

void check_flow_defined(const LocalCharacteristics& chars) {
  if (!chars.flow && !chars.ode_rhs) {
    throw Error("characteristics define neither a closed-form flow nor an ODE");
  }
}

// phi(x, t) without boundary checks.
State flow_from(const LocalCharacteristics& chars, const State& x, double t) {
  if (chars.flow) return chars.flow(x, t);
  State y = x;
  Rk4Stepper stepper(y.size());
  stepper.advance(chars.ode_rhs, y, t, chars.ode_step);
  return y;
}

double rate_at(const LocalCharacteristics& chars, const State& y) {
  if (!chars.jump_rate) throw Error("characteristics have no jump_rate");
  const double r = chars.jump_rate(y);
  if (!(r >= 0.0)) throw Error("jump_rate returned a negative or NaN value");
  return r;
}

// t*(x), reported as +infinity when no crossing is found at or before
// min(cap, search.max_time).
double boundary_time_capped(const LocalCharacteristics& chars, const State& x,
                            double cap, const BoundarySearch& search) {
  if (chars.boundary_time_fn) return chars.boundary_time_fn(x);
  if (!chars.boundary_event_fn) return kInfiniteTime;
  const double limit = std::min(cap, search.max_time);
  if (!(limit > 0.0)) return kInfiniteTime;
  if (chars.boundary_event_fn(x) <= 0.0) return 0.0;

  if (chars.flow) {
    double prev_t = 0.0;
    double step = search.initial_step;
    while (prev_t < limit) {
      const double t = std::min(prev_t + step, limit);
      const double g = chars.boundary_event_fn(chars.flow(x, t));
      if (g <= 0.0) {
        if (g == 0.0) return t;
        return find_root(
            [&](double tau) { return chars.boundary_event_fn(chars.flow(x, tau)); },
            prev_t, t, search.tol);
      }
      prev_t = t;
      step *= search.growth;
    }
    return kInfiniteTime;
  }

  // ODE flow: march incrementally, refine the bracketing segment by
  // re-integrating from its saved start state.
  State y = x;
  Rk4Stepper stepper(y.size());
  double cur_t = 0.0;
  double step = search.initial_step;
  while (cur_t < limit) {
    const double next_t = std::min(cur_t + step, limit);
    const State y_prev = y;
    const double prev_t = cur_t;
    stepper.advance(chars.ode_rhs, y, next_t - cur_t, chars.ode_step);
    cur_t = next_t;
    const double g = chars.boundary_event_fn(y);
    if (g <= 0.0) {
      if (g == 0.0) return cur_t;
      auto probe = [&](double tau) {
        State z = y_prev;
        Rk4Stepper inner(z.size());
        inner.advance(chars.ode_rhs, z, tau - prev_t, chars.ode_step);
        return chars.boundary_event_fn(z);
      };
      return find_root(probe, prev_t, cur_t, search.tol);
    }
    step *= search.growth;
  }
  return kInfiniteTime;
}

struct EventDraw {
  double time = kInfiniteTime;
  bool hit_boundary = false;
  bool has_event = false;  // false: censored at the cap (or no jump at all)
  State pre_jump_state;
};

EventDraw censored() { return {}; }

EventDraw boundary_event(const LocalCharacteristics& chars, const State& x,
                         double tstar) {
  EventDraw e;
  e.time = tstar;
  e.hit_boundary = true;
  e.has_event = true;
  e.pre_jump_state = flow_from(chars, x, tstar);
  return e;
}

// Lambda(x, t) for ODE flows: integrate [dy/dt = F(y), dL/dt = lambda(y)].
double hazard_by_augmented_ode(const LocalCharacteristics& chars, const State& x,
                               double t) {
  State aug = x;
  aug.push_back(0.0);
  OdeRhs rhs = [&chars](const State& z, State& dz) {
    State y(z.begin(), z.end() - 1);
    State dy(y.size());
    chars.ode_rhs(y, dy);
    std::copy(dy.begin(), dy.end(), dz.begin());
    dz.back() = rate_at(chars, y);
  };
  Rk4Stepper stepper(aug.size());
  stepper.advance(rhs, aug, t, chars.ode_step);
  return aug.back();
}

// Solves Lambda(x, t) = target for closed-form flows by expanding blocks of
// adaptive quadrature, then Brent inside the crossing block.
EventDraw invert_hazard_closed_flow(const LocalCharacteristics& chars,
                                    const State& x, double target, double cap) {
  const double tstar = boundary_time_capped(chars, x, cap, {});
  const double limit = std::min(cap, tstar);
  auto rate_along = [&](double s) { return rate_at(chars, chars.flow(x, s)); };

  if (chars.cumulative_hazard_fn) {
    // Closed-form Lambda but no registered inverse: bracket and root-find
    // on it directly.
    auto lam = [&](double t) { return chars.cumulative_hazard_fn(x, t); };
    double hi = std::min(1.0, limit);
    double lo = 0.0;
    while (lam(hi) < target && hi < limit) {
      lo = hi;
      hi = std::min(2.0 * hi, limit);
    }
    if (lam(hi) < target) {
      if (tstar <= cap) return boundary_event(chars, x, tstar);
      return censored();
    }
    const double t = find_root([&](double tau) { return lam(tau) - target; }, lo, hi);
    EventDraw e;
    e.time = t;
    e.has_event = true;
    e.pre_jump_state = chars.flow(x, t);
    return e;
  }

  double lo = 0.0;
  double acc = 0.0;
  double width = 1.0;
  while (lo < limit) {
    const double hi = std::min(lo + width, limit);
    const double piece = integrate(rate_along, lo, hi, 1e-12);
    if (acc + piece >= target) {
      const double t = find_root(
          [&](double tau) { return acc + integrate(rate_along, lo, tau, 1e-12) - target; },
          lo, hi);
      EventDraw e;
      e.time = t;
      e.has_event = true;
      e.pre_jump_state = chars.flow(x, t);
      return e;
    }
    acc += piece;
    lo = hi;
    width *= 2.0;
  }
  if (tstar <= cap) return boundary_event(chars, x, tstar);
  return censored();
}

// Same inversion for ODE flows, marching the augmented system.
EventDraw invert_hazard_ode_flow(const LocalCharacteristics& chars, const State& x,
                                 double target, double cap) {
  const double tstar = boundary_time_capped(chars, x, cap, {});
  const double limit = std::min(cap, tstar);
  State aug = x;
  aug.push_back(0.0);
  OdeRhs rhs = [&chars](const State& z, State& dz) {
    State y(z.begin(), z.end() - 1);
    State dy(y.size());
    chars.ode_rhs(y, dy);
    std::copy(dy.begin(), dy.end(), dz.begin());
    dz.back() = rate_at(chars, y);
  };
  Rk4Stepper stepper(aug.size());
  double t = 0.0;
  while (t < limit) {
    const State prev = aug;
    const double t0 = t;
    const double dt = std::min(chars.ode_step, limit - t);
    stepper.step(rhs, aug, dt);
    t += dt;
    if (aug.back() >= target) {
      auto probe = [&](double tau) {
        State z = prev;
        Rk4Stepper inner(z.size());
        inner.advance(rhs, z, tau - t0, chars.ode_step);
        return z.back() - target;
      };
      const double tj = (prev.back() == target) ? t0 : find_root(probe, t0, t);
      State z = prev;
      Rk4Stepper inner(z.size());
      inner.advance(rhs, z, tj - t0, chars.ode_step);
      z.pop_back();
      EventDraw e;
      e.time = tj;
      e.has_event = true;
      e.pre_jump_state = std::move(z);
      return e;
    }
  }
  if (tstar <= cap) return boundary_event(chars, x, tstar);
  return censored();
}

EventDraw draw_spontaneous(const LocalCharacteristics& chars, const State& x,
                           double u, double cap,
                           bool use_registered_inverse = true) {
  const double target = -std::log(u);
  if (use_registered_inverse && chars.hazard_inverse_fn) {
    const double t_spont = chars.hazard_inverse_fn(x, target);
    const double tstar =
        boundary_time_capped(chars, x, std::min(cap, t_spont), {});
    if (tstar <= t_spont && tstar <= cap) return boundary_event(chars, x, tstar);
    if (t_spont <= cap) {
      EventDraw e;
      e.time = t_spont;
      e.has_event = true;
      e.pre_jump_state = flow_from(chars, x, t_spont);
      return e;
    }
    return censored();
  }
  if (chars.flow) return invert_hazard_closed_flow(chars, x, target, cap);
  return invert_hazard_ode_flow(chars, x, target, cap);
}

EventDraw draw_by_thinning(const LocalCharacteristics& chars, const State& x,
                           RandomStream& stream, double cap) {
  if (!chars.rate_bound) {
    throw RateBoundError("thinning requested without a rate_bound");
  }
  const double bound = *chars.rate_bound;
  if (!(bound > 0.0)) throw RateBoundError("rate_bound must be positive");
  const double tstar = boundary_time_capped(chars, x, cap, {});
  const double limit = std::min(cap, tstar);

  const bool closed = static_cast<bool>(chars.flow);
  State y = x;
  Rk4Stepper stepper(y.size());
  double s = 0.0;
  for (std::size_t proposals = 0; proposals < 100'000'000; ++proposals) {
    const double s_next = s + stream.exponential(bound);
    if (s_next >= limit) {
      if (tstar <= cap) return boundary_event(chars, x, tstar);
      return censored();
    }
    if (closed) {
      y = chars.flow(x, s_next);
    } else {
      stepper.advance(chars.ode_rhs, y, s_next - s, chars.ode_step);
    }
    const double lam = rate_at(chars, y);
    if (lam > bound * (1.0 + 1e-9)) {
      throw RateBoundError("observed jump rate " + std::to_string(lam) +
                           " exceeds rate_bound " + std::to_string(bound));
    }
    if (stream.uniform() * bound < lam) {
      EventDraw e;
      e.time = s_next;
      e.has_event = true;
      e.pre_jump_state = y;
      return e;
    }
    s = s_next;
  }
  throw Error("thinning proposal cap exceeded");
}

EventDraw draw_event(const LocalCharacteristics& chars, const State& x,
                     RandomStream& stream, double cap) {
  check_flow_defined(chars);
  switch (chars.sampling) {
    case JumpSampling::kClosedForm:
      if (!chars.hazard_inverse_fn) {
        throw Error("closed-form sampling requested without hazard_inverse_fn");
      }
      return draw_spontaneous(chars, x, stream.uniform(), cap);
    case JumpSampling::kNumericInversion:
      return draw_spontaneous(chars, x, stream.uniform(), cap,
                              /*use_registered_inverse=*/false);
    case JumpSampling::kThinning:
      return draw_by_thinning(chars, x, stream, cap);
    case JumpSampling::kAuto:
    default:
      if (chars.hazard_inverse_fn) {
        return draw_spontaneous(chars, x, stream.uniform(), cap);
      }
      if (chars.rate_bound) return draw_by_thinning(chars, x, stream, cap);
      return draw_spontaneous(chars, x, stream.uniform(), cap);
  }
}

}  // namespace

State flow_at(const LocalCharacteristics& chars, const State& x, double t) {
  check_flow_defined(chars);
  check_finite(x, "flow_at");
  if (!std::isfinite(t) || t < 0.0) throw Error("flow_at: time must be finite and >= 0");
  if (chars.boundary_time_fn) {
    const double tstar = chars.boundary_time_fn(x);
    if (t > tstar) throw Error("flow_at: time is past the boundary exit");
  }
  State y = flow_from(chars, x, t);
  if (!chars.boundary_time_fn && chars.boundary_event_fn) {
    if (chars.boundary_event_fn(y) < -kBoundarySlack) {
      throw Error("flow_at: time is past the boundary exit");
    }
  }
  return y;
}

double boundary_time(const LocalCharacteristics& chars, const State& x,
                     const BoundarySearch& search) {
  check_flow_defined(chars);
  check_finite(x, "boundary_time");
  return boundary_time_capped(chars, x, search.max_time, search);
}

double cumulative_hazard(const LocalCharacteristics& chars, const State& x,
                         double t) {
  check_flow_defined(chars);
  check_finite(x, "cumulative_hazard");
  if (!std::isfinite(t) || t < 0.0) {
    throw Error("cumulative_hazard: time must be finite and >= 0");
  }
  if (chars.boundary_time_fn || chars.boundary_event_fn) {
    const double tstar = boundary_time_capped(chars, x, t, {});
    if (t > tstar + kBoundarySlack) {
      throw Error("cumulative_hazard: time is past the boundary exit");
    }
  }
  if (chars.cumulative_hazard_fn) return chars.cumulative_hazard_fn(x, t);
  if (chars.flow) {
    return integrate([&](double s) { return rate_at(chars, chars.flow(x, s)); },
                     0.0, t, 1e-10);
  }
  return hazard_by_augmented_ode(chars, x, t);
}

InterJumpSample inter_jump_quantile(const LocalCharacteristics& chars,
                                    const State& x, double u) {
  check_flow_defined(chars);
  check_finite(x, "inter_jump_quantile");
  if (!(u > 0.0 && u < 1.0)) throw Error("inter_jump_quantile: u must be in (0,1)");
  const EventDraw e = draw_spontaneous(chars, x, u, kMaxSearchTime);
  if (!e.has_event) return {};
  return {e.time, e.hit_boundary};
}

InterJumpSample sample_inter_jump(const LocalCharacteristics& chars,
                                  const State& x, RandomStream& stream) {
  check_finite(x, "sample_inter_jump");
  const EventDraw e = draw_event(chars, x, stream, kMaxSearchTime);
  if (!e.has_event) return {};
  return {e.time, e.hit_boundary};
}

Trajectory simulate(const LocalCharacteristics& chars, const State& x0,
                    double horizon, RandomStream& stream,
                    const SimulateOptions& options) {
  check_flow_defined(chars);
  check_finite(x0, "simulate");
  if (!chars.transition_sampler) throw Error("simulate: no transition_sampler");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error("simulate: horizon must be finite and positive");
  }
  if (chars.boundary_event_fn && chars.boundary_event_fn(x0) <= 0.0) {
    throw Error("simulate: initial state is not inside the state space");
  }

  Trajectory traj;
  traj.initial_state = x0;
  traj.horizon = horizon;
  traj.chars = &chars;

  State z = x0;
  double t = 0.0;
  while (t < horizon) {
    const EventDraw e = draw_event(chars, z, stream, horizon - t);
    if (!e.has_event) break;
    const double t_next = t + e.time;
    if (t_next > horizon) break;
    State z_next = chars.transition_sampler(e.pre_jump_state, stream);
    check_finite(z_next, "simulate: transition_sampler");
    if (z_next == e.pre_jump_state) {
      throw Error("simulate: transition_sampler returned its input state");
    }
    traj.inter_jump_times.push_back(e.time);
    traj.jump_times.push_back(t_next);
    traj.post_jump_states.push_back(z_next);
    traj.kinds.push_back(e.hit_boundary ? EventKind::kBoundaryJump
                                        : EventKind::kJump);
    if (traj.jump_times.size() > options.max_jumps) {
      throw ExplosionError("simulate: more than " +
                           std::to_string(options.max_jumps) +
                           " jumps before t = " + std::to_string(t_next));
    }
    z = std::move(z_next);
    t = t_next;
  }
  return traj;
}

State state_at(const Trajectory& traj, double t) {
  if (traj.chars == nullptr) throw Error("state_at: trajectory has no characteristics");
  if (!(t >= 0.0) || t > traj.horizon) {
    throw Error("state_at: time outside [0, horizon]");
  }
  const auto& times = traj.jump_times;
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return flow_from(*traj.chars, traj.initial_state, t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin()) - 1;
  return flow_from(*traj.chars, traj.post_jump_states[k], t - times[k]);
}

}  // namespace pdmp
