#pragma once

#include "pdmp/characteristics.hpp"

namespace pdmp {

/// The TCP window-size process on [0, inf): unit upward drift, halving at
/// congestion events. The linear variant jumps at rate x (congestion more
/// likely at high throughput); the constant variant at fixed rate r.
struct TcpModel {
  enum class Variant { kLinearRate, kConstantRate };
  Variant variant = Variant::kLinearRate;
  double r = 1.0;  // only used by the constant-rate variant
};

/// Characteristics with the closed-form hazard and its inverse registered,
/// so jump times are sampled exactly. No boundary: the drift points away
/// from 0 and t* is infinite everywhere.
LocalCharacteristics tcp_characteristics(const TcpModel& model = {});

/// Exact conditional density of the first jump time from x under the
/// linear-rate variant: f(x,t) = (x + t) exp(-(xt + t^2/2)).
double tcp_true_density(double x, double t);

/// P_x(T_1 > t) = exp(-(t^2/2 + xt)) for the linear-rate variant.
double tcp_survival(double x, double t);

/// Jump-time quantile for the linear-rate variant: the t solving
/// xt + t^2/2 = target, in a cancellation-free form.
double tcp_hazard_inverse(double x, double target);

struct TheoreticalRates {
  double c;
  double lambda;
};

/// Contraction constants of the dynamical coupling:
/// c = sqrt(2)(3 + sqrt(3))/8 and lambda = sqrt(2)(1 - sqrt(c)).
TheoreticalRates theoretical_rates();

/// exp(-t^2/2 - min(x,y) t): the probability that the lower-started copy
/// has not jumped by t, which lower-bounds the total variation distance
/// between the time-t laws from x and from y.
double tv_lower_bound(double x, double y, double t);

}  // namespace pdmp
