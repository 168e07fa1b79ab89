#pragma once

#include <functional>

namespace pdmp {

/// Brent root finding on [a, b]; f(a) and f(b) must bracket a sign change.
/// Returns the root to absolute x-tolerance tol_x.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol_x = 1e-12, int max_iter = 200);

}  // namespace pdmp
