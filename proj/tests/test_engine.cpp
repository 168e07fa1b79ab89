#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "pdmp/csv.hpp"
#include "pdmp/engine.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/stats.hpp"
#include "pdmp/tcp.hpp"

using namespace pdmp;

namespace {

// Flow x + t, no jumps, no boundary.
LocalCharacteristics silent_drift() {
  LocalCharacteristics chars;
  chars.flow = [](const State& x, double t) { return State{x[0] + t}; };
  chars.jump_rate = [](const State&) { return 0.0; };
  chars.transition_sampler = [](const State& x, RandomStream&) {
    return State{x[0] / 2.0};
  };
  return chars;
}

LocalCharacteristics constant_rate(double r) {
  LocalCharacteristics chars = silent_drift();
  chars.jump_rate = [r](const State&) { return r; };
  return chars;
}

// M = (0, 1), unit drift, no spontaneous jumps; exit at the upper end and
// restart from 0.5.
LocalCharacteristics unit_interval_drift(bool closed_form_exit) {
  LocalCharacteristics chars = silent_drift();
  if (closed_form_exit) {
    chars.boundary_time_fn = [](const State& x) { return 1.0 - x[0]; };
  } else {
    chars.boundary_event_fn = [](const State& x) { return 1.0 - x[0]; };
  }
  chars.transition_sampler = [](const State&, RandomStream&) {
    return State{0.5};
  };
  return chars;
}

}  // namespace

TEST_CASE("flow_at: closed forms and identity") {
  const auto tcp = tcp_characteristics();
  CHECK(flow_at(tcp, {1.0}, 2.0)[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(flow_at(tcp, {5.0}, 0.0)[0] == 5.0);

  LocalCharacteristics decay;
  decay.ode_rhs = [](const State& y, State& dy) { dy[0] = -y[0]; };
  decay.jump_rate = [](const State&) { return 0.0; };
  // y e^{-t}: from 2 over ln 2 lands on 1.
  CHECK(flow_at(decay, {2.0}, std::log(2.0))[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("flow_at rejects bad input") {
  const auto tcp = tcp_characteristics();
  CHECK_THROWS_AS(flow_at(tcp, {std::nan("")}, 1.0), Error);
  CHECK_THROWS_AS(flow_at(tcp, {1.0}, -0.5), Error);
  const auto boundary = unit_interval_drift(true);
  CHECK_THROWS_AS(flow_at(boundary, {0.3}, 0.8), Error);
  CHECK(flow_at(boundary, {0.3}, 0.7)[0] == doctest::Approx(1.0));
}

TEST_CASE("boundary_time") {
  const auto tcp = tcp_characteristics();
  CHECK(boundary_time(tcp, {0.0}) == kInfiniteTime);
  CHECK(boundary_time(tcp, {7.5}) == kInfiniteTime);

  const auto closed = unit_interval_drift(true);
  CHECK(boundary_time(closed, {0.3}) == doctest::Approx(0.7).epsilon(1e-12));

  const auto scanned = unit_interval_drift(false);
  CHECK(boundary_time(scanned, {0.3}) == doctest::Approx(0.7).epsilon(1e-8));
}

TEST_CASE("cumulative_hazard") {
  const auto tcp = tcp_characteristics();
  // int_0^2 (1 + s) ds = 4
  CHECK(cumulative_hazard(tcp, {1.0}, 2.0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cumulative_hazard(silent_drift(), {3.0}, 11.0) == 0.0);
  CHECK(cumulative_hazard(constant_rate(3.0), {0.0}, 2.0) ==
        doctest::Approx(6.0).epsilon(1e-10));
}

TEST_CASE("inter_jump_quantile: pinned survival draws") {
  const auto tcp = tcp_characteristics();
  // Lambda(0, t) = t^2/2 = 2  =>  t = 2
  const auto a = inter_jump_quantile(tcp, {0.0}, std::exp(-2.0));
  CHECK(a.time == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(a.hit_boundary);

  TcpModel constant{TcpModel::Variant::kConstantRate, 1.0};
  const auto b = inter_jump_quantile(tcp_characteristics(constant), {4.0}, std::exp(-1.0));
  CHECK(b.time == doctest::Approx(1.0).epsilon(1e-12));

  const auto none = inter_jump_quantile(silent_drift(), {1.0}, 0.5);
  CHECK(none.time == kInfiniteTime);
  CHECK_FALSE(none.hit_boundary);
}

TEST_CASE("sample_inter_jump survival law, x in {0, 1, 5}") {
  const auto tcp = tcp_characteristics();
  for (double x : {0.0, 1.0, 5.0}) {
    RandomStream stream(2024, static_cast<std::uint64_t>(x));
    std::vector<double> draws;
    draws.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
      draws.push_back(sample_inter_jump(tcp, {x}, stream).time);
    }
    const double d = ks_statistic(
        draws, [x](double t) { return 1.0 - tcp_survival(x, t); });
    CHECK(d < 1.36 / std::sqrt(1e5) * 1.5);
  }
}

TEST_CASE("inversion consistency: closed form vs quadrature root-finding") {
  const auto closed = tcp_characteristics();
  LocalCharacteristics numeric = closed;
  numeric.cumulative_hazard_fn = nullptr;
  numeric.hazard_inverse_fn = nullptr;

  RandomStream stream(77, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = stream.uniform(0.0, 5.0);
    const double u = stream.uniform();
    const double ta = inter_jump_quantile(closed, {x}, u).time;
    const double tb = inter_jump_quantile(numeric, {x}, u).time;
    REQUIRE(std::abs(ta - tb) < 1e-8);
  }
}

TEST_CASE("semigroup law") {
  const auto tcp = tcp_characteristics();
  RandomStream stream(31, 0);
  for (int i = 0; i < 1000; ++i) {
    const double x = stream.uniform(0.0, 5.0);
    const double s = stream.uniform(0.0, 3.0);
    const double t = stream.uniform(0.0, 3.0);
    const double direct = flow_at(tcp, {x}, s + t)[0];
    const double composed = flow_at(tcp, flow_at(tcp, {x}, s), t)[0];
    REQUIRE(std::abs(direct - composed) < 1e-9);
  }

  LocalCharacteristics pull;  // dy/dt = -(y - 1)
  pull.ode_rhs = [](const State& y, State& dy) { dy[0] = -(y[0] - 1.0); };
  pull.jump_rate = [](const State&) { return 0.0; };
  for (int i = 0; i < 1000; ++i) {
    const double x = stream.uniform(-2.0, 2.0);
    const double s = stream.uniform(0.0, 2.0);
    const double t = stream.uniform(0.0, 2.0);
    const double direct = flow_at(pull, {x}, s + t)[0];
    const double composed = flow_at(pull, flow_at(pull, {x}, s), t)[0];
    REQUIRE(std::abs(direct - composed) < 1e-6);
  }
}

TEST_CASE("simulate: first jump halves the drifted state") {
  const auto tcp = tcp_characteristics();
  RandomStream stream(5150, 0);
  const Trajectory traj = simulate(tcp, {1.0}, 50.0, stream);
  REQUIRE(traj.jump_count() > 0);
  const double t1 = traj.inter_jump_times[0];
  CHECK(traj.post_jump_states[0][0] == (1.0 + t1) / 2.0);  // exact
  CHECK(traj.jump_times[0] == t1);
}

TEST_CASE("simulate: silent model never jumps") {
  RandomStream stream(8, 0);
  const auto chars = silent_drift();
  const Trajectory traj = simulate(chars, {2.0}, 10.0, stream);
  CHECK(traj.jump_count() == 0);
  CHECK(state_at(traj, 7.25)[0] == doctest::Approx(9.25).epsilon(1e-14));
}

TEST_CASE("simulate: constant-rate jump counts match the Poisson mean") {
  const auto chars = constant_rate(2.0);
  const double horizon = 5.0;
  const auto counts = monte_carlo(
      chars, {0.0}, horizon, 20000, 99,
      [](const Trajectory& t) { return static_cast<double>(t.jump_count()); });
  const double m = mean(counts);
  const double se = std_error(counts);
  CHECK(std::abs(m - 10.0) < 3.0 * se + 1e-9);
}

TEST_CASE("simulate: boundary exits force jumps") {
  for (bool closed_form : {true, false}) {
    CAPTURE(closed_form);
    const auto chars = unit_interval_drift(closed_form);
    RandomStream stream(3, 0);
    const Trajectory traj = simulate(chars, {0.3}, 2.0, stream);
    REQUIRE(traj.jump_count() == 3);  // exits at 0.7, 1.2, 1.7
    CHECK(traj.jump_times[0] == doctest::Approx(0.7).epsilon(1e-8));
    CHECK(traj.jump_times[1] == doctest::Approx(1.2).epsilon(1e-8));
    CHECK(traj.jump_times[2] == doctest::Approx(1.7).epsilon(1e-8));
    for (auto kind : traj.kinds) CHECK(kind == EventKind::kBoundaryJump);
    for (const auto& z : traj.post_jump_states) CHECK(z[0] == 0.5);
    CHECK(state_at(traj, 0.9)[0] == doctest::Approx(0.7).epsilon(1e-8));
  }
}

TEST_CASE("simulate: explosion guard trips") {
  const auto chars = constant_rate(1.0);
  RandomStream stream(4, 0);
  SimulateOptions options;
  options.max_jumps = 100;
  CHECK_THROWS_AS(simulate(chars, {0.0}, 1e9, stream, options), ExplosionError);
}

TEST_CASE("thinning needs a rate bound") {
  auto chars = constant_rate(1.0);
  chars.sampling = JumpSampling::kThinning;
  RandomStream stream(6, 0);
  CHECK_THROWS_AS(sample_inter_jump(chars, {0.0}, stream), RateBoundError);

  chars.rate_bound = 2.0;
  const auto s = sample_inter_jump(chars, {0.0}, stream);
  CHECK(s.time < kInfiniteTime);
}

TEST_CASE("thinning agrees with the exponential law") {
  auto chars = constant_rate(1.5);
  chars.sampling = JumpSampling::kThinning;
  chars.rate_bound = 4.0;
  RandomStream stream(12, 0);
  std::vector<double> draws;
  for (int i = 0; i < 50000; ++i) {
    draws.push_back(sample_inter_jump(chars, {0.0}, stream).time);
  }
  const double d =
      ks_statistic(draws, [](double t) { return 1.0 - std::exp(-1.5 * t); });
  CHECK(d < 1.63 / std::sqrt(5e4));  // 1% level
}

TEST_CASE("state_at conventions") {
  const auto tcp = tcp_characteristics();
  RandomStream stream(21, 0);
  const Trajectory traj = simulate(tcp, {2.0}, 20.0, stream);
  REQUIRE(traj.jump_count() > 2);
  CHECK(state_at(traj, 0.0)[0] == 2.0);
  for (std::size_t k = 0; k < traj.jump_count(); ++k) {
    CHECK(state_at(traj, traj.jump_times[k])[0] == traj.post_jump_states[k][0]);
  }
  const double tk = traj.jump_times[1];
  const double zk = traj.post_jump_states[1][0];
  CHECK(state_at(traj, tk + 0.0005)[0] == doctest::Approx(zk + 0.0005).epsilon(1e-12));
  CHECK_THROWS_AS(state_at(traj, 20.5), Error);
}

TEST_CASE("monte_carlo: empty, deterministic, and error-tagged") {
  const auto tcp = tcp_characteristics();
  const auto none = monte_carlo(tcp, {1.0}, 5.0, 0, 1,
                                [](const Trajectory& t) { return t.horizon; });
  CHECK(none.empty());

  auto last_state = [](const Trajectory& t) { return state_at(t, t.horizon)[0]; };
  const auto a = monte_carlo(tcp, {1.0}, 5.0, 500, 42, last_state);
  const auto b = monte_carlo(tcp, {1.0}, 5.0, 500, 42, last_state);
  CHECK(a == b);

  SimulateOptions tight;
  tight.max_jumps = 1;
  try {
    monte_carlo(tcp, {3.0}, 50.0, 4, 7, last_state, tight);
    FAIL("expected an explosion error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("path 0") != std::string::npos);
  }
}

TEST_CASE("monte_carlo mean jump count matches an independent simulator") {
  // Straightforward reference implementation with its own RNG and its own
  // (naive) inversion formula.
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 20000;
  std::vector<double> reference;
  reference.reserve(n);
  for (int p = 0; p < n; ++p) {
    double x = 0.0, t = 0.0;
    double count = 0.0;
    for (;;) {
      double u;
      do {
        u = unif(rng);
      } while (u <= 0.0);
      const double target = -std::log(u);
      const double s = -x + std::sqrt(x * x + 2.0 * target);
      if (t + s > 10.0) break;
      t += s;
      x = (x + s) / 2.0;
      count += 1.0;
    }
    reference.push_back(count);
  }

  const auto counts = monte_carlo(
      tcp_characteristics(), {0.0}, 10.0, n, 314,
      [](const Trajectory& t) { return static_cast<double>(t.jump_count()); });

  const double se = std::sqrt(std_error(counts) * std_error(counts) +
                              std_error(reference) * std_error(reference));
  CHECK(std::abs(mean(counts) - mean(reference)) < 3.0 * se);
}

TEST_CASE("identical seeds give byte-identical serialized paths") {
  const auto tcp = tcp_characteristics();
  auto serialize = [&](std::uint64_t seed) {
    RandomStream stream(seed, 0);
    const Trajectory traj = simulate(tcp, {1.0}, 30.0, stream);
    std::ostringstream out;
    write_trajectory_csv_header(out, 1);
    write_trajectory_csv(out, 0, traj);
    return out.str();
  };
  CHECK(serialize(1001) == serialize(1001));
  CHECK(serialize(1001) != serialize(1002));
}

TEST_CASE("transition sampler may not return its input") {
  auto chars = constant_rate(1.0);
  chars.transition_sampler = [](const State& x, RandomStream&) { return x; };
  RandomStream stream(9, 0);
  CHECK_THROWS_AS(simulate(chars, {1.0}, 10.0, stream), Error);
}
