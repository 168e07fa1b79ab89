#include "pdmp/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdmp/errors.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/tcp.hpp"

namespace pdmp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_nonneg(double x, double y) {
  if (!(x >= 0.0) || !(y >= 0.0) || !std::isfinite(x) || !std::isfinite(y)) {
    throw Error("coupling: start points must be finite and >= 0");
  }
}

// First jump time of a TCP path from z, drawn exactly.
double draw_tcp_jump(double z, RandomStream& stream) {
  return tcp_hazard_inverse(z, -std::log(stream.uniform()));
}

// State of a fresh TCP path started at z after `window` time units.
double evolve_tcp(double z, double window, RandomStream& stream) {
  double t = 0.0;
  for (;;) {
    const double s = draw_tcp_jump(z, stream);
    if (t + s > window) return z + (window - t);
    t += s;
    z = (z + s) / 2.0;
  }
}

struct StickingDraws {
  bool matched = false;
  double t_high = 0.0;   // first jump time of the higher path
  double t_low = 0.0;    // first jump time of the lower path
  double second_low = 0.0;  // second inter-jump time of the lower path
  bool success = false;
};

// Maximal coupling of T1 from `hi` with (T1 from `lo`) + delta, realized by
// rejection against the pointwise minimum of the two densities; residuals
// are drawn from the normalized positive parts. The higher path's time is
// kept either way, so both marginals are exact.
StickingDraws sticking_draws(double hi, double lo, RandomStream& stream) {
  const double delta = hi - lo;
  StickingDraws out;

  const double t_high = draw_tcp_jump(hi, stream);
  out.t_high = t_high;

  auto p = [hi](double s) { return tcp_true_density(hi, s); };
  auto q = [lo, delta](double s) {
    return s >= delta ? tcp_true_density(lo, s - delta) : 0.0;
  };

  if (delta == 0.0) {
    out.matched = true;
    out.t_low = t_high;
  } else if (stream.uniform() * p(t_high) < q(t_high)) {
    out.matched = true;
    out.t_low = t_high - delta;
  } else {
    // Residual of the shifted law: resample until the density comparison
    // flips the other way.
    for (int tries = 0; tries < 10'000'000; ++tries) {
      const double cand = draw_tcp_jump(lo, stream) + delta;
      if (stream.uniform() * q(cand) > p(cand)) {
        out.t_low = cand - delta;
        break;
      }
      if (tries == 10'000'000 - 1) {
        throw Error("sticking_attempt: residual rejection did not terminate");
      }
    }
    out.matched = false;
  }

  const double z_low = (lo + out.t_low) / 2.0;
  out.second_low = draw_tcp_jump(z_low, stream);
  out.success = out.matched && out.second_low >= delta;
  return out;
}

}  // namespace

CoupledPath simulate_pair(double x, double y, double horizon, RandomStream& stream) {
  check_nonneg(x, y);
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
    throw Error("simulate_pair: horizon must be finite and >= 0");
  }
  CoupledPath path;
  path.x0 = x;
  path.y0 = y;
  path.horizon = horizon;
  if (x == y) path.coalesced_at = 0.0;

  double xc = x, yc = y;
  double gap = std::abs(x - y);
  double t = 0.0;
  for (;;) {
    const double m = std::min(xc, yc);
    // Simultaneous clock: hazard m + s along the shared drift.
    const double s_sim = tcp_hazard_inverse(m, -std::log(stream.uniform()));
    // Solo clock for the higher path: constant rate = gap.
    const double s_solo = gap > 0.0 ? stream.exponential(gap) : kInf;
    const double s = std::min(s_sim, s_solo);
    if (t + s > horizon) break;
    t += s;
    const double x_pre = xc + s;
    const double y_pre = yc + s;
    if (s_sim <= s_solo) {
      xc = x_pre / 2.0;
      yc = y_pre / 2.0;
      gap = gap / 2.0;  // both halve, so the gap halves exactly
      path.simultaneous.push_back(true);
    } else {
      if (x_pre >= y_pre) {
        xc = x_pre / 2.0;
        yc = y_pre;
      } else {
        xc = x_pre;
        yc = y_pre / 2.0;
      }
      gap = std::abs(xc - yc);
      path.simultaneous.push_back(false);
    }
    path.times.push_back(t);
    path.states.emplace_back(xc, yc);
    path.gaps.push_back(gap);
    if (gap == 0.0 && !path.coalesced_at) path.coalesced_at = t;
  }
  return path;
}

std::pair<double, double> pair_at(const CoupledPath& path, double t) {
  if (!(t >= 0.0) || t > path.horizon) {
    throw Error("pair_at: time outside [0, horizon]");
  }
  const auto it = std::upper_bound(path.times.begin(), path.times.end(), t);
  if (it == path.times.begin()) return {path.x0 + t, path.y0 + t};
  const std::size_t k = static_cast<std::size_t>(it - path.times.begin()) - 1;
  const double dt = t - path.times[k];
  return {path.states[k].first + dt, path.states[k].second + dt};
}

StickingResult sticking_attempt(double x, double y, RandomStream& stream) {
  check_nonneg(x, y);
  const double hi = std::max(x, y);
  const double lo = std::min(x, y);
  const StickingDraws d = sticking_draws(hi, lo, stream);
  StickingResult result;
  result.success = d.success;
  if (d.success) result.coalescence_time = d.t_high;
  return result;
}

CompositeResult composite_tv_coupling(double x, double y, double epsilon,
                                      double horizon, RandomStream& stream,
                                      const CompositeCouplingConfig& config) {
  check_nonneg(x, y);
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error("composite_tv_coupling: epsilon must lie in (0,1)");
  }
  if (!(horizon >= 0.0)) throw Error("composite_tv_coupling: bad horizon");
  if (x == y) return {true, 0.0};

  const double lambda_tilde = config.lambda_tilde_factor * theoretical_rates().lambda;
  const double log_inv_eps = std::log(1.0 / epsilon);
  const double t1 = log_inv_eps / lambda_tilde;
  const double w2 = config.phase2_window_factor * std::sqrt(log_inv_eps);

  double a = x, b = y;
  double t = 0.0;
  while (t < horizon) {
    // Phase 1: dynamical coupling shrinks the gap geometrically.
    const double window = std::min(t1, horizon - t);
    const CoupledPath leg = simulate_pair(a, b, window, stream);
    const auto end_state = pair_at(leg, window);
    a = end_state.first;
    b = end_state.second;
    t += window;
    if (a == b) return {true, t};
    if (t >= horizon) break;

    const double gap = std::abs(a - b);
    if (gap > epsilon) continue;

    // Phase 2: one sticking attempt, then a deterministic window w2 in
    // which both marginals are rolled forward using the drawn jumps.
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    const StickingDraws d = sticking_draws(hi, lo, stream);
    if (d.success) return {true, t + d.t_high};

    double hi_next, lo_next;
    if (d.t_high <= w2) {
      hi_next = evolve_tcp((hi + d.t_high) / 2.0, w2 - d.t_high, stream);
    } else {
      hi_next = hi + w2;  // no jump inside the window; discard the rest
    }
    if (d.t_low > w2) {
      lo_next = lo + w2;
    } else if (d.t_low + d.second_low > w2) {
      lo_next = (lo + d.t_low) / 2.0 + (w2 - d.t_low);
    } else {
      const double z2 = ((lo + d.t_low) / 2.0 + d.second_low) / 2.0;
      lo_next = evolve_tcp(z2, w2 - d.t_low - d.second_low, stream);
    }
    a = hi_next;
    b = lo_next;
    t += w2;
  }
  return {false, std::nullopt};
}

double empirical_wasserstein(std::vector<double> a, std::vector<double> b, double p) {
  if (a.size() != b.size()) {
    throw Error("empirical_wasserstein: samples must have equal length");
  }
  if (a.empty()) throw Error("empirical_wasserstein: empty samples");
  if (!(p >= 1.0) && p != 0.5) {
    throw Error("empirical_wasserstein: order must be >= 1 or exactly 1/2");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += std::pow(std::abs(a[i] - b[i]), p);
  }
  acc /= static_cast<double>(a.size());
  return p >= 1.0 ? std::pow(acc, 1.0 / p) : acc;
}

std::vector<std::optional<double>> coalescence_times(
    double x, double y, double horizon, std::size_t n, std::uint64_t seed,
    const CompositeCouplingConfig& config) {
  std::vector<std::optional<double>> out(n);
  parallel_for(n, [&](std::size_t i) {
    RandomStream stream(seed, i);
    const CompositeResult r =
        composite_tv_coupling(x, y, config.epsilon, horizon, stream, config);
    if (r.coalesced) out[i] = r.time;
  });
  return out;
}

double estimate_tv_upper(double x, double y, double t, std::size_t n_pairs,
                         std::uint64_t seed, const CompositeCouplingConfig& config) {
  if (n_pairs < 1) throw Error("estimate_tv_upper: need at least one pair");
  const auto times = coalescence_times(x, y, t, n_pairs, seed, config);
  std::size_t not_coalesced = 0;
  for (const auto& ct : times) {
    if (!ct || *ct > t) ++not_coalesced;
  }
  return static_cast<double>(not_coalesced) / static_cast<double>(n_pairs);
}

RateFit fit_rate(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw Error("fit_rate: length mismatch");
  if (times.size() < 3) throw Error("fit_rate: need at least three points");
  const std::size_t n = times.size();
  std::vector<double> logs(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(values[i] > 0.0)) throw Error("fit_rate: values must be positive");
    logs[i] = std::log(values[i]);
  }
  double t_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t_mean += times[i];
    y_mean += logs[i];
  }
  t_mean /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (times[i] - t_mean) * (times[i] - t_mean);
    sxy += (times[i] - t_mean) * (logs[i] - y_mean);
  }
  if (sxx == 0.0) throw Error("fit_rate: degenerate time grid");
  const double slope = sxy / sxx;

  RateFit fit;
  fit.rate = -slope;
  fit.intercept = y_mean - slope * t_mean;
  fit.t_min = *std::min_element(times.begin(), times.end());
  fit.t_max = *std::max_element(times.begin(), times.end());
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = logs[i] - (fit.intercept + slope * times[i]);
    rss += resid * resid;
  }
  fit.residual_rms = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

}  // namespace pdmp
