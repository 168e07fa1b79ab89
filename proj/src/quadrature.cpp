#include "pdmp/quadrature.hpp"

#include <cmath>

#include "pdmp/errors.hpp"

namespace pdmp {
namespace {

struct SimpsonSlice {
  double fa, fm, fb;
  double estimate;
};

SimpsonSlice simpson(const std::function<double(double)>& f, double a, double b,
                     double fa, double fb) {
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  SimpsonSlice s{fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb)};
  return s;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                const SimpsonSlice& whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const SimpsonSlice left = simpson(f, a, m, whole.fa, whole.fm);
  const SimpsonSlice right = simpson(f, m, b, whole.fm, whole.fb);
  const double delta = left.estimate + right.estimate - whole.estimate;
  if (std::abs(delta) <= 15.0 * tol) {
    return left.estimate + right.estimate + delta / 15.0;
  }
  if (depth <= 0) {
    throw QuadratureError("adaptive quadrature did not converge");
  }
  return adaptive(f, a, m, left, 0.5 * tol, depth - 1) +
         adaptive(f, m, b, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, int max_depth) {
  if (!(a <= b)) throw Error("integrate: reversed interval");
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw QuadratureError("integrate: non-finite integrand at endpoint");
  }
  // Seed with four panels so narrow features near the midpoint are not
  // missed by the first convergence test.
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  SimpsonSlice left{fa, 0, fm, 0};
  SimpsonSlice right{fm, 0, fb, 0};
  left = simpson(f, a, m, fa, fm);
  right = simpson(f, m, b, fm, fb);
  return adaptive(f, a, m, left, 0.5 * abs_tol, max_depth) +
         adaptive(f, m, b, right, 0.5 * abs_tol, max_depth);
}

double integrate_to_infinity(const std::function<double(double)>& f, double a,
                             double abs_tol, double tail_tol) {
  double total = 0.0;
  double lo = a;
  double width = 1.0;
  for (int block = 0; block < 128; ++block) {
    const double piece = integrate(f, lo, lo + width, abs_tol * 0.25);
    total += piece;
    lo += width;
    width *= 2.0;
    if (std::abs(piece) < tail_tol) return total;
  }
  throw QuadratureError("integrate_to_infinity: tail did not decay");
}

}  // namespace pdmp
