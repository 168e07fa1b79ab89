#pragma once

#include <functional>

namespace pdmp {

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance.
/// Throws QuadratureError if the recursion depth limit is hit before the
/// tolerance is met (non-integrable or wildly oscillatory integrand).
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, int max_depth = 60);

/// Integral of f over [a, inf): expands the upper limit geometrically until
/// the tail contribution of one expansion falls below tail_tol.
double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double abs_tol = 1e-10, double tail_tol = 1e-12);

}  // namespace pdmp
