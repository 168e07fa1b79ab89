#pragma once

#include <functional>
#include <vector>

#include "pdmp/characteristics.hpp"
#include "pdmp/random.hpp"

namespace pdmp {

/// Markov switching model: the position follows one of n vector fields on
/// R^d, and the active field index jumps at position-dependent rates.
/// Engine states are laid out as (y_0, ..., y_{d-1}, mode) with the mode an
/// integer-valued trailing coordinate; modes are 0-based.
struct SwitchingModel {
  int d = 1;
  int n_modes = 2;

  // fields[i] writes F^i(y) into dy; both vectors have size d.
  std::vector<std::function<void(const State&, State&)>> fields;

  // rates(i, j, y) = lambda_ij(y) >= 0, with lambda_ii identically 0 and an
  // irreducible positive-entry pattern at every y in K.
  std::function<double(int, int, const State&)> rates;

  // Uniform bound on sum_j lambda_ij(y) over K, for thinning proposals.
  double rate_bound = 0.0;

  // Axis-aligned box K declared invariant under every field. Trajectories
  // are asserted to stay inside it at run time.
  State k_lo, k_hi;

  double ode_step = 1e-3;
};

int switching_mode(const State& x);
State switching_state(const State& y, int mode);

/// Validates the model at sampled points of K (diagonal rates zero,
/// irreducible rate pattern, declared bound respected) and returns engine
/// characteristics. The flow freezes the mode and integrates its field;
/// jumps move only the mode coordinate; t* is infinite; sampling thins
/// proposals of intensity rate_bound.
LocalCharacteristics switching_characteristics(const SwitchingModel& model);

struct OccupancyHistogram {
  State lo, hi;           // covered box (K)
  std::vector<int> bins;  // per position dimension
  int n_modes = 0;
  // mass[mode][flat bin index], row-major over position dimensions;
  // total mass over all modes and bins is 1.
  std::vector<std::vector<double>> mass;

  double bin_width(int dim) const { return (hi[dim] - lo[dim]) / bins[dim]; }
  double mode_mass(int mode) const;
  /// Mass of bins (summed over modes) whose interval along `dim` lies
  /// entirely outside [lo_bound, hi_bound].
  double mass_outside(int dim, double lo_bound, double hi_bound) const;
};

/// Time-weighted occupancy of (Y_t, I_t) over [burn_in, horizon] on a
/// regular grid over K, computed from one simulated path and normalized to
/// total mass 1.
OccupancyHistogram occupancy_histogram(const SwitchingModel& model,
                                       const State& x0, double horizon,
                                       double burn_in,
                                       const std::vector<int>& bins,
                                       RandomStream& stream);

}  // namespace pdmp
