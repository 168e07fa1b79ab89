#include "pdmp/ode.hpp"

#include <cmath>

#include "pdmp/errors.hpp"

namespace pdmp {

void Rk4Stepper::step(const OdeRhs& rhs, State& y, double h) {
  const std::size_t n = y.size();
  rhs(y, k1_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
  rhs(tmp_, k2_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
  rhs(tmp_, k3_);
  for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
  rhs(tmp_, k4_);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }
}

void Rk4Stepper::advance(const OdeRhs& rhs, State& y, double t, double h) {
  if (t < 0.0 || !std::isfinite(t)) throw Error("Rk4Stepper: bad time span");
  if (h <= 0.0) throw Error("Rk4Stepper: step size must be positive");
  double remaining = t;
  while (remaining > 0.0) {
    const double step_size = remaining < h ? remaining : h;
    step(rhs, y, step_size);
    remaining -= step_size;
  }
}

}  // namespace pdmp
