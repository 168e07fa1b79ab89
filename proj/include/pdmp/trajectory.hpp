#pragma once

#include <cstddef>
#include <vector>

#include "pdmp/characteristics.hpp"

namespace pdmp {

enum class EventKind {
  kJump,          // spontaneous, from the jump rate
  kBoundaryJump,  // forced by the flow hitting the boundary
};

/// One simulated path: jump times T_k, post-jump locations Z_k, and the
/// characteristics needed to flow between them. Between T_k and T_{k+1} the
/// path is phi(Z_k, t - T_k).
///
/// inter_jump_times stores the sampled increments S_k exactly as drawn;
/// jump_times is their running sum, so T_k and the S_k reproduce each other
/// bit for bit.
struct Trajectory {
  State initial_state;
  std::vector<double> jump_times;
  std::vector<double> inter_jump_times;
  std::vector<State> post_jump_states;
  std::vector<EventKind> kinds;
  double horizon = 0.0;

  // Not owned; must outlive the trajectory.
  const LocalCharacteristics* chars = nullptr;

  std::size_t jump_count() const { return jump_times.size(); }
};

/// X(t) for t in [0, horizon]; right continuous, so state_at(T_k) is Z_k.
State state_at(const Trajectory& traj, double t);

}  // namespace pdmp
