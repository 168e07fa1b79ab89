#pragma once

#include <functional>
#include <vector>

namespace pdmp {

using State = std::vector<double>;
using OdeRhs = std::function<void(const State&, State&)>;

/// Fixed-step classical Runge-Kutta stepper with reusable scratch buffers.
/// Advances autonomous systems dy/dt = F(y).
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t dim)
      : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  /// One step of size h, in place.
  void step(const OdeRhs& rhs, State& y, double h);

  /// Advance y by total time t using steps of size at most h (the final
  /// step is shortened to land exactly on t).
  void advance(const OdeRhs& rhs, State& y, double t, double h);

 private:
  State k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace pdmp
