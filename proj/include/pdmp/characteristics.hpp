#pragma once

#include <functional>
#include <optional>

#include "pdmp/ode.hpp"
#include "pdmp/random.hpp"

namespace pdmp {

enum class JumpSampling {
  kAuto,              // closed-form inverse if registered, else thinning if a
                      // rate bound is present, else numeric hazard inversion
  kClosedForm,
  kNumericInversion,
  kThinning,
};

/// Local characteristics (flow, jump rate, transition kernel) plus the
/// boundary exit time of the state space. A process is fully defined by one
/// of these values; the engine never needs anything else.
///
/// States are flat real vectors. A discrete mode, when present, rides along
/// as a trailing integer-valued coordinate.
struct LocalCharacteristics {
  int state_dim = 1;

  // Deterministic motion: exactly one of `flow` (closed form, exact) or
  // `ode_rhs` (dy/dt = F(y), integrated with fixed-step RK4) must be set.
  std::function<State(const State&, double)> flow;
  OdeRhs ode_rhs;
  double ode_step = 1e-3;

  std::function<double(const State&)> jump_rate;

  // Samples Q(x, .). Must return states inside the open state space M, and
  // never the input state itself (Q charges M - {x} only; the kernel is not
  // allowed to place mass on the boundary).
  std::function<State(const State&, RandomStream&)> transition_sampler;

  // Mass Q(x, [lo, hi]) of the first coordinate, for 1-D kernel sweeps.
  std::function<double(const State&, double, double)> transition_interval_mass;

  // Boundary of M, if any: a closed-form exit time t*(x), or an event
  // function positive inside M whose zero along the flow marks the exit.
  // Neither set means t* = +infinity everywhere.
  std::function<double(const State&)> boundary_time_fn;
  std::function<double(const State&)> boundary_event_fn;

  // Closed-form cumulative hazard Lambda(x, t) and its inverse in t
  // (solves Lambda(x, t) = target). Registering the inverse gives exact
  // constant-time jump sampling.
  std::function<double(const State&, double)> cumulative_hazard_fn;
  std::function<double(const State&, double)> hazard_inverse_fn;

  // Uniform bound on jump_rate along flows, enabling thinning.
  std::optional<double> rate_bound;

  JumpSampling sampling = JumpSampling::kAuto;
};

}  // namespace pdmp
