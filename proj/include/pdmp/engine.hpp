#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "pdmp/characteristics.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/random.hpp"
#include "pdmp/trajectory.hpp"

namespace pdmp {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct SimulateOptions {
  // Aborts a path whose jump count exceeds this on a bounded horizon;
  // converts a (theoretically excluded) explosion into a diagnosable error.
  std::size_t max_jumps = 10'000'000;
};

struct BoundarySearch {
  double initial_step = 1e-2;
  double growth = 1.5;
  double max_time = 1e6;  // report +infinity if no crossing found by here
  double tol = 1e-10;
};

struct InterJumpSample {
  double time = kInfiniteTime;  // +infinity when the process never jumps
  bool hit_boundary = false;
};

/// phi(x, t). Exact for closed-form flows, RK4 otherwise. Rejects
/// non-finite inputs and times past the boundary exit.
State flow_at(const LocalCharacteristics& chars, const State& x, double t);

/// t*(x) = inf{t > 0 : phi(x, t) hits the boundary}, +infinity when the
/// flow never exits. With only an event function registered, the crossing
/// is bracketed by a geometric scan and bisected to search.tol.
double boundary_time(const LocalCharacteristics& chars, const State& x,
                     const BoundarySearch& search = {});

/// Lambda(x, t): integral of the jump rate along the flow. Uses the
/// registered closed form when present, else adaptive quadrature
/// (absolute tolerance 1e-10) for closed-form flows, else an augmented
/// RK4 integration for ODE flows.
double cumulative_hazard(const LocalCharacteristics& chars, const State& x,
                         double t);

/// Jump time for a given survival draw u in (0,1): the solution t of
/// Lambda(x, t) = -ln u, the boundary time when the hazard never
/// accumulates that much before the exit, or +infinity when neither
/// happens. Not available for thinning-sampled models.
InterJumpSample inter_jump_quantile(const LocalCharacteristics& chars,
                                    const State& x, double u);

/// Draws the next inter-jump time from x. Strategy per chars.sampling.
InterJumpSample sample_inter_jump(const LocalCharacteristics& chars,
                                  const State& x, RandomStream& stream);

/// Full path on [0, horizon].
Trajectory simulate(const LocalCharacteristics& chars, const State& x0,
                    double horizon, RandomStream& stream,
                    const SimulateOptions& options = {});

/// Runs n_paths independent paths on streams (seed, path index) and applies
/// `extract` to each. Results are index ordered, so the output is identical
/// regardless of thread schedule. Per-path errors carry the path index.
template <typename Extractor>
auto monte_carlo(const LocalCharacteristics& chars, const State& x0,
                 double horizon, std::size_t n_paths, std::uint64_t seed,
                 Extractor&& extract, const SimulateOptions& options = {})
    -> std::vector<std::invoke_result_t<Extractor&, const Trajectory&>> {
  using Result = std::invoke_result_t<Extractor&, const Trajectory&>;
  std::vector<Result> results(n_paths);
  parallel_for(n_paths, [&](std::size_t i) {
    try {
      RandomStream stream(seed, i);
      const Trajectory traj = simulate(chars, x0, horizon, stream, options);
      results[i] = extract(traj);
    } catch (const Error& e) {
      throw Error("path " + std::to_string(i) + ": " + e.what());
    }
  });
  return results;
}

}  // namespace pdmp
