#pragma once

#include <utility>
#include <vector>

#include "pdmp/random.hpp"
#include "pdmp/trajectory.hpp"

namespace pdmp {

/// The chain Theta_n = (Z_n, S_n): post-jump locations paired with the
/// inter-jump times; entry 0 is (initial state, 0).
struct EmbeddedChain {
  struct Entry {
    State z;
    double s = 0.0;
  };
  std::vector<Entry> entries;

  std::size_t size() const { return entries.size(); }
};

EmbeddedChain embedded_chain(const Trajectory& traj);

enum class ObservationOrigin { kJump, kObservation };

/// The trajectory recorded both at its jumps and at the points of an
/// independent unit-rate Poisson clock.
struct ObservationChain {
  struct Entry {
    State state;
    double time = 0.0;
    ObservationOrigin origin = ObservationOrigin::kJump;
  };
  std::vector<Entry> entries;
};

ObservationChain observation_chain(const Trajectory& traj, RandomStream& stream);

/// Finite union of closed intervals on the first state coordinate; the
/// indicator sets accepted by the kernel sweeps.
class IntervalSet {
 public:
  IntervalSet() = default;  // empty set
  static IntervalSet full();
  static IntervalSet interval(double lo, double hi);
  IntervalSet& add(double lo, double hi);

  bool is_full() const { return full_; }
  bool contains(double v) const;
  const std::vector<std::pair<double, double>>& pieces() const { return pieces_; }

 private:
  bool full_ = false;
  std::vector<std::pair<double, double>> pieces_;
};

/// H(x, A) = int_0^{t*} exp(-(s + Lambda(x,s))) 1_A(phi(x,s)) ds, the
/// observation-time part of the Costa-Dufour kernel. 1-D models only;
/// quadrature to absolute tolerance 1e-8, with the infinite upper limit
/// truncated where s + Lambda(x,s) reaches 40.
double kernel_H_mass(const LocalCharacteristics& chars, const State& x,
                     const IntervalSet& set);

/// J(x, A) = int_0^{t*} lambda(phi(x,s)) exp(-(s + Lambda(x,s))) Q(phi(x,s), A) ds
///           + exp(-(t* + Lambda(x,t*))) Q(phi(x,t*), A),
/// the jump part (spontaneous plus boundary term). Same restrictions.
double kernel_J_mass(const LocalCharacteristics& chars, const State& x,
                     const IntervalSet& set);

/// |H(x, M) + J(x, M) - 1|: the deviation of G = H + J from stochasticity.
double check_markov_kernel(const LocalCharacteristics& chars, const State& x);

}  // namespace pdmp
