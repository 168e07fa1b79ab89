#include "pdmp/tcp.hpp"

#include <cmath>

#include "pdmp/errors.hpp"

namespace pdmp {

LocalCharacteristics tcp_characteristics(const TcpModel& model) {
  if (model.variant == TcpModel::Variant::kConstantRate && !(model.r > 0.0)) {
    throw Error("tcp_characteristics: constant jump rate r must be positive");
  }
  LocalCharacteristics chars;
  chars.state_dim = 1;
  chars.flow = [](const State& x, double t) { return State{x[0] + t}; };
  chars.transition_sampler = [](const State& x, RandomStream&) {
    return State{x[0] / 2.0};
  };
  chars.transition_interval_mass = [](const State& x, double lo, double hi) {
    const double z = x[0] / 2.0;
    return (z >= lo && z <= hi) ? 1.0 : 0.0;
  };
  if (model.variant == TcpModel::Variant::kLinearRate) {
    chars.jump_rate = [](const State& x) { return x[0]; };
    chars.cumulative_hazard_fn = [](const State& x, double t) {
      return x[0] * t + 0.5 * t * t;
    };
    chars.hazard_inverse_fn = [](const State& x, double target) {
      return tcp_hazard_inverse(x[0], target);
    };
  } else {
    const double r = model.r;
    chars.jump_rate = [r](const State&) { return r; };
    chars.cumulative_hazard_fn = [r](const State&, double t) { return r * t; };
    chars.hazard_inverse_fn = [r](const State&, double target) {
      return target / r;
    };
  }
  return chars;
}

double tcp_hazard_inverse(double x, double target) {
  // Solves xt + t^2/2 = target; equivalent to -x + sqrt(x^2 + 2 target)
  // but stable for large x.
  return 2.0 * target / (x + std::sqrt(x * x + 2.0 * target));
}

double tcp_survival(double x, double t) {
  if (x < 0.0 || t < 0.0) throw Error("tcp_survival: arguments must be >= 0");
  return std::exp(-(0.5 * t * t + x * t));
}

double tcp_true_density(double x, double t) {
  if (x < 0.0 || t < 0.0) throw Error("tcp_true_density: arguments must be >= 0");
  return (x + t) * std::exp(-(x * t + 0.5 * t * t));
}

TheoreticalRates theoretical_rates() {
  const double c = std::sqrt(2.0) * (3.0 + std::sqrt(3.0)) / 8.0;
  const double lambda = std::sqrt(2.0) * (1.0 - std::sqrt(c));
  return {c, lambda};
}

double tv_lower_bound(double x, double y, double t) {
  if (x < 0.0 || y < 0.0 || t < 0.0) {
    throw Error("tv_lower_bound: arguments must be >= 0");
  }
  return std::exp(-0.5 * t * t - std::min(x, y) * t);
}

}  // namespace pdmp
