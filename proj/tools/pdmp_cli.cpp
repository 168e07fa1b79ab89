// Batch experiment runner: simulation, distance curves, kernel sweeps,
// chain exports, and density estimation, all seed-deterministic and
// emitting plot-ready CSV.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pdmp/chains.hpp"
#include "pdmp/config.hpp"
#include "pdmp/coupling.hpp"
#include "pdmp/csv.hpp"
#include "pdmp/engine.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/estimation.hpp"
#include "pdmp/stats.hpp"
#include "pdmp/tcp.hpp"

namespace {

using namespace pdmp;

std::vector<double> parse_state(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stod(token));
  }
  if (out.empty()) throw Error("empty state: " + text);
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  // start:end[:step], inclusive ends
  std::vector<double> parts;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ':')) parts.push_back(std::stod(token));
  if (parts.size() < 2 || parts.size() > 3) {
    throw Error("grid must be start:end[:step], got " + text);
  }
  const double start = parts[0];
  const double end = parts[1];
  const double step = parts.size() == 3 ? parts[2] : 1.0;
  if (!(step > 0.0) || end < start) throw Error("bad grid: " + text);
  std::vector<double> grid;
  for (double t = start; t <= end + 1e-9 * step; t += step) grid.push_back(t);
  return grid;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  return out;
}

struct ModelFlags {
  std::string config_path;
  std::string model;  // tcp | tcp-const | switching
  double r = 1.0;
  bool r_set = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "Model: tcp, tcp-const or switching")
        ->check(CLI::IsMember({"tcp", "tcp-const", "switching"}));
    cmd->add_option("--config", config_path, "Model configuration file");
    cmd->add_option("--r", r, "Constant jump rate (tcp-const)")
        ->check(CLI::PositiveNumber)
        ->each([this](const std::string&) { r_set = true; });
  }

  ModelSpec resolve() const {
    Config cfg;
    if (!config_path.empty()) cfg = Config::parse_file(config_path);
    if (!model.empty()) {
      cfg.set("model", "type", model == "switching" ? "switching" : "tcp");
      if (model == "tcp") cfg.set("model", "variant", "linear");
      if (model == "tcp-const") cfg.set("model", "variant", "constant");
    }
    if (r_set) cfg.set("model", "r", format_double(r));
    if (!cfg.has("model", "type")) {
      throw Error("no model given: pass --model or --config");
    }
    return model_from_config(cfg);
  }
};

int run_simulate(const ModelFlags& flags, const std::string& x0_text,
                 double horizon, std::size_t paths, std::uint64_t seed,
                 const std::string& out_path) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec spec = flags.resolve();
  const LocalCharacteristics chars = spec.characteristics();
  const State x0 = parse_state(x0_text);
  if (static_cast<int>(x0.size()) != spec.state_dim()) {
    throw Error("x0 has " + std::to_string(x0.size()) + " coordinates, model needs " +
                std::to_string(spec.state_dim()));
  }

  std::ofstream out = open_output(out_path);
  write_provenance(out, seed);
  write_trajectory_csv_header(out, spec.state_dim());
  std::size_t total_jumps = 0;
  for (std::size_t p = 0; p < paths; ++p) {
    RandomStream stream(seed, p);
    const Trajectory traj = simulate(chars, x0, horizon, stream);
    total_jumps += traj.jump_count();
    write_trajectory_csv(out, p, traj);
  }
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  std::cout << "paths=" << paths << " total_jumps=" << total_jumps
            << " wall_time=" << elapsed.count() << "s\n";
  return 0;
}

void print_fit(std::ostream& out, const RateFit& fit) {
  out << "fit: rate=" << format_double(fit.rate)
      << " intercept=" << format_double(fit.intercept) << " window=["
      << format_double(fit.t_min) << "," << format_double(fit.t_max)
      << "] residual_rms=" << format_double(fit.residual_rms) << "\n";
}

void write_fit_csv(const std::string& path, const RateFit& fit, std::uint64_t seed) {
  if (path.empty()) return;
  std::ofstream out = open_output(path);
  write_provenance(out, seed);
  out << "rate,intercept,t_min,t_max,residual_rms\n";
  out << format_double(fit.rate) << ',' << format_double(fit.intercept) << ','
      << format_double(fit.t_min) << ',' << format_double(fit.t_max) << ','
      << format_double(fit.residual_rms) << "\n";
}

struct DistanceOptions {
  std::string metric;
  std::string a_samples, b_samples;
  double p = 1.0;
  double x = -1.0, y = -1.0;
  std::string x0_text;
  std::string grid_text;
  std::size_t pairs = 10000;
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  double epsilon = 0.05;
  std::string ref_samples;
  std::size_t ref_run = 0;
  double ref_burnin = 50.0;
  double ref_spacing = 1.0;
  double ref_x0 = 1.0;
  std::string ref_out;
  std::string out_path;
  std::string fit_out;
};

// W1 between a Monte Carlo sample of X_t from x0 and a fixed reference
// sample, per grid point. The reference comes from a file or from one long
// run harvested at regular spacing after burn-in.
int run_distance_stationary(const DistanceOptions& o) {
  std::vector<double> reference;
  if (!o.ref_samples.empty()) {
    reference = read_sample_file(o.ref_samples);
  } else {
    const LocalCharacteristics chars = tcp_characteristics();
    const double horizon =
        o.ref_burnin + static_cast<double>(o.ref_run) * o.ref_spacing;
    RandomStream stream(o.seed, 1u << 20);
    const Trajectory traj = simulate(chars, {o.ref_x0}, horizon, stream);
    reference.reserve(o.ref_run);
    for (std::size_t k = 1; k <= o.ref_run; ++k) {
      reference.push_back(
          state_at(traj, o.ref_burnin + static_cast<double>(k) * o.ref_spacing)[0]);
    }
    if (!o.ref_out.empty()) {
      std::ofstream rout = open_output(o.ref_out);
      write_provenance(rout, o.seed);
      write_sample_csv(rout, reference);
    }
  }
  if (reference.empty()) throw Error("empty reference sample");

  const auto grid = parse_grid(o.grid_text);
  const State x0 = parse_state(o.x0_text);
  const LocalCharacteristics chars = tcp_characteristics();
  const double horizon = grid.back();
  const std::size_t n = o.paths;

  const auto harvested = monte_carlo(
      chars, x0, horizon, n, o.seed, [&grid](const Trajectory& traj) {
        std::vector<double> states(grid.size());
        for (std::size_t g = 0; g < grid.size(); ++g) {
          states[g] = state_at(traj, grid[g])[0];
        }
        return states;
      });

  std::ofstream out = open_output(o.out_path);
  write_provenance(out, o.seed);
  out << "t,estimate,stderr,n\n";
  std::vector<double> ts, vs;
  RandomStream boot_seed(o.seed, 1u << 21);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> sample(n);
    for (std::size_t i = 0; i < n; ++i) sample[i] = harvested[i][g];
    if (sample.size() != reference.size()) {
      throw Error("reference size " + std::to_string(reference.size()) +
                  " must match --paths " + std::to_string(n));
    }
    const double w = empirical_wasserstein(sample, reference, o.p);
    // Bootstrap spread of the sample side.
    const int b_reps = 16;
    std::vector<double> boots;
    boots.reserve(b_reps);
    for (int b = 0; b < b_reps; ++b) {
      RandomStream rs =
          boot_seed.substream(static_cast<std::uint64_t>(b) * grid.size() + g);
      std::vector<double> resampled(n);
      for (std::size_t i = 0; i < n; ++i) {
        resampled[i] = sample[static_cast<std::size_t>(rs.uniform() * n)];
      }
      boots.push_back(empirical_wasserstein(resampled, reference, o.p));
    }
    const double se = sample_stddev(boots);
    out << format_double(grid[g]) << ',' << format_double(w) << ','
        << format_double(se) << ',' << n << "\n";
    if (w > 0.0) {
      ts.push_back(grid[g]);
      vs.push_back(w);
    }
  }
  if (ts.size() >= 3) {
    const RateFit fit = fit_rate(ts, vs);
    print_fit(std::cout, fit);
    write_fit_csv(o.fit_out, fit, o.seed);
  }
  return 0;
}

// Coupled-pair mean gap E|X_t - Y_t|^p along the grid.
int run_distance_pairs(const DistanceOptions& o, double p) {
  const auto grid = parse_grid(o.grid_text);
  if (o.x < 0.0 || o.y < 0.0) throw Error("coupled mode needs --x and --y >= 0");
  const double horizon = grid.back();
  const std::size_t n = o.pairs;

  std::vector<std::vector<double>> gaps(grid.size(), std::vector<double>(n));
  parallel_for(n, [&](std::size_t i) {
    RandomStream stream(o.seed, i);
    const CoupledPath path = simulate_pair(o.x, o.y, horizon, stream);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto [px, py] = pair_at(path, grid[g]);
      gaps[g][i] = std::pow(std::abs(px - py), p);
    }
  });

  std::ofstream out = open_output(o.out_path);
  write_provenance(out, o.seed);
  out << "t,estimate,stderr,n\n";
  std::vector<double> ts, vs;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double m = mean(gaps[g]);
    const double se = std_error(gaps[g]);
    out << format_double(grid[g]) << ',' << format_double(m) << ','
        << format_double(se) << ',' << n << "\n";
    if (m > 0.0) {
      ts.push_back(grid[g]);
      vs.push_back(m);
    }
  }
  if (ts.size() >= 3) {
    const RateFit fit = fit_rate(ts, vs);
    print_fit(std::cout, fit);
    write_fit_csv(o.fit_out, fit, o.seed);
  }
  return 0;
}

// Fraction of composite couplings not coalesced by t, with the analytic
// lower bound as a companion column.
int run_distance_tv(const DistanceOptions& o) {
  const auto grid = parse_grid(o.grid_text);
  if (o.x < 0.0 || o.y < 0.0) throw Error("tv_upper needs --x and --y >= 0");
  CompositeCouplingConfig config;
  config.epsilon = o.epsilon;
  const auto times = coalescence_times(o.x, o.y, grid.back(), o.pairs, o.seed, config);

  std::ofstream out = open_output(o.out_path);
  write_provenance(out, o.seed);
  out << "t,estimate,stderr,n,lower_bound\n";
  std::vector<double> ts, vs;
  for (double t : grid) {
    std::size_t open = 0;
    for (const auto& ct : times) {
      if (!ct || *ct > t) ++open;
    }
    const double frac = static_cast<double>(open) / static_cast<double>(times.size());
    const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(times.size()));
    out << format_double(t) << ',' << format_double(frac) << ',' << format_double(se)
        << ',' << times.size() << ',' << format_double(tv_lower_bound(o.x, o.y, t))
        << "\n";
    if (frac > 0.0) {
      ts.push_back(t);
      vs.push_back(frac);
    }
  }
  if (ts.size() >= 3) {
    const RateFit fit = fit_rate(ts, vs);
    print_fit(std::cout, fit);
    write_fit_csv(o.fit_out, fit, o.seed);
  }
  return 0;
}

int run_distance(const DistanceOptions& o) {
  if (!o.a_samples.empty() || !o.b_samples.empty()) {
    if (o.a_samples.empty() || o.b_samples.empty()) {
      throw Error("need both --a-samples and --b-samples");
    }
    const double p = o.metric == "w_half" ? 0.5 : o.p;
    const double w = empirical_wasserstein(read_sample_file(o.a_samples),
                                           read_sample_file(o.b_samples), p);
    std::cout << o.metric << "=" << format_double(w) << "\n";
    if (!o.out_path.empty()) {
      std::ofstream out = open_output(o.out_path);
      write_provenance(out, o.seed);
      out << "t,estimate,stderr,n\n0," << format_double(w) << ",0,0\n";
    }
    return 0;
  }
  if (o.grid_text.empty()) throw Error("need --grid (or sample files)");
  if (o.metric == "tv_upper") return run_distance_tv(o);
  if (o.metric == "w_half") return run_distance_pairs(o, 0.5);
  if (!o.x0_text.empty() && (o.ref_run > 0 || !o.ref_samples.empty())) {
    return run_distance_stationary(o);
  }
  return run_distance_pairs(o, o.p);
}

int run_kernels(const ModelFlags& flags, const std::string& points_text,
                const std::string& out_path, std::uint64_t seed) {
  const ModelSpec spec = flags.resolve();
  const LocalCharacteristics chars = spec.characteristics();
  const std::vector<double> points = parse_state(points_text);

  std::ofstream out = open_output(out_path);
  write_provenance(out, seed);
  out << "x,H_mass,J_mass,deviation\n";
  for (double x : points) {
    const double h = kernel_H_mass(chars, {x}, IntervalSet::full());
    const double j = kernel_J_mass(chars, {x}, IntervalSet::full());
    out << format_double(x) << ',' << format_double(h) << ',' << format_double(j)
        << ',' << format_double(std::abs(h + j - 1.0)) << "\n";
  }
  return 0;
}

int run_chain(const ModelFlags& flags, const std::string& x0_text, double horizon,
              std::uint64_t seed, const std::string& kind,
              const std::string& out_path) {
  const ModelSpec spec = flags.resolve();
  const LocalCharacteristics chars = spec.characteristics();
  const State x0 = parse_state(x0_text);
  RandomStream stream(seed, 0);
  const Trajectory traj = simulate(chars, x0, horizon, stream);

  std::ofstream out = open_output(out_path);
  write_provenance(out, seed);
  if (kind == "embedded") {
    write_embedded_chain_csv(out, embedded_chain(traj));
  } else {
    RandomStream obs_stream(seed, 1);
    write_observation_chain_csv(out, observation_chain(traj, obs_stream));
  }
  return 0;
}

struct EstimateOptions {
  std::string chain_path;
  std::size_t jumps = 0;
  double x = 0.5;
  double a_width = 0.2;
  int blocks = 8;
  double bandwidth = 0.0;
  std::string kernel = "epanechnikov";
  std::string grid_text;
  std::uint64_t seed = 0;
  std::string out_path;
};

int run_estimate(const ModelFlags& flags, const EstimateOptions& o) {
  EmbeddedChain chain;
  bool have_true_density = false;
  if (!o.chain_path.empty()) {
    chain = read_embedded_chain_file(o.chain_path);
  } else {
    if (o.jumps == 0) throw Error("need --chain or --jumps");
    const ModelSpec spec = flags.resolve();
    if (spec.kind != ModelSpec::Kind::kTcp) {
      throw Error("on-the-fly chains are TCP only; export a chain CSV instead");
    }
    have_true_density = spec.tcp.variant == TcpModel::Variant::kLinearRate;
    const LocalCharacteristics chars = spec.characteristics();
    RandomStream stream(o.seed, 0);
    chain.entries.push_back({State{o.x}, 0.0});
    State z{o.x};
    while (chain.entries.size() <= o.jumps) {
      const auto jump = sample_inter_jump(chars, z, stream);
      const State pre{z[0] + jump.time};
      z = chars.transition_sampler(pre, stream);
      chain.entries.push_back({z, jump.time});
    }
  }

  const auto grid = parse_grid(o.grid_text);
  const Partition partition = build_partition(chain, o.x, o.a_width, o.blocks);
  const TransitionSample transitions = TransitionSample::from_chain(chain);
  const double bandwidth =
      o.bandwidth > 0.0 ? o.bandwidth : default_bandwidth(transitions, partition.set_a);

  KernelShape shape = KernelShape::kEpanechnikov;
  if (o.kernel == "triangular") shape = KernelShape::kTriangular;
  if (o.kernel == "uniform") shape = KernelShape::kUniform;

  const DensityEstimate est =
      estimate_density(chain, o.x, partition, grid, bandwidth, shape);

  std::ofstream out = open_output(o.out_path);
  write_provenance(out, o.seed);
  out << "# x=" << format_double(o.x) << " A=[" << format_double(partition.set_a.lo)
      << "," << format_double(partition.set_a.hi) << "] blocks=" << o.blocks
      << " bandwidth=" << format_double(bandwidth) << " kernel=" << o.kernel
      << " n_used=" << est.n_used << "\n";
  out << (have_true_density ? "t,f_hat,f_true\n" : "t,f_hat\n");
  for (std::size_t g = 0; g < grid.size(); ++g) {
    out << format_double(grid[g]) << ',' << format_double(est.values[g]);
    if (have_true_density) out << ',' << format_double(tcp_true_density(o.x, grid[g]));
    out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-driven simulation and analysis of piecewise deterministic "
               "Markov processes"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Simulate trajectories to CSV");
  ModelFlags sim_model;
  sim_model.attach(sim);
  std::string sim_x0 = "1";
  double sim_horizon = 10.0;
  std::size_t sim_paths = 1;
  std::uint64_t sim_seed = 0;
  std::string sim_out = "trajectories.csv";
  sim->add_option("--x0", sim_x0, "Initial state (comma separated)");
  sim->add_option("--horizon", sim_horizon, "Time horizon")->check(CLI::PositiveNumber);
  sim->add_option("--paths", sim_paths, "Number of independent paths");
  sim->add_option("--seed", sim_seed, "Master seed");
  sim->add_option("--out", sim_out, "Output CSV path");

  auto* dist = app.add_subcommand("distance", "Distance curves and rate fits");
  DistanceOptions dopt;
  dist->add_option("--metric", dopt.metric, "w1, w_half or tv_upper")
      ->required()
      ->check(CLI::IsMember({"w1", "w_half", "tv_upper"}));
  dist->add_option("--a-samples", dopt.a_samples, "Sample file (one column)");
  dist->add_option("--b-samples", dopt.b_samples, "Sample file (one column)");
  dist->add_option("--p", dopt.p, "Wasserstein order for w1 mode");
  dist->add_option("--x", dopt.x, "First start point");
  dist->add_option("--y", dopt.y, "Second start point");
  dist->add_option("--x0", dopt.x0_text, "Start for the stationary comparison");
  dist->add_option("--grid", dopt.grid_text, "Time grid start:end[:step]");
  dist->add_option("--pairs", dopt.pairs, "Coupled pairs per estimate");
  dist->add_option("--paths", dopt.paths, "Paths for the stationary comparison");
  dist->add_option("--seed", dopt.seed, "Master seed");
  dist->add_option("--epsilon", dopt.epsilon, "Gap target for tv_upper");
  dist->add_option("--ref-samples", dopt.ref_samples, "Reference sample CSV");
  dist->add_option("--ref-run", dopt.ref_run,
                   "Harvest this many reference states from one long run");
  dist->add_option("--ref-burnin", dopt.ref_burnin, "Reference burn-in time");
  dist->add_option("--ref-spacing", dopt.ref_spacing, "Reference harvest spacing");
  dist->add_option("--ref-x0", dopt.ref_x0, "Reference run start point");
  dist->add_option("--ref-out", dopt.ref_out, "Save the harvested reference");
  dist->add_option("--out", dopt.out_path, "Output CSV path");
  dist->add_option("--fit-out", dopt.fit_out, "Rate-fit CSV path");

  auto* ker = app.add_subcommand("kernels", "H/J kernel mass sweep");
  ModelFlags ker_model;
  ker_model.attach(ker);
  std::string ker_points = "0,1,5";
  std::string ker_out = "kernels.csv";
  std::uint64_t ker_seed = 0;
  ker->add_option("--points", ker_points, "Probe points (comma separated)");
  ker->add_option("--out", ker_out, "Output CSV path");
  ker->add_option("--seed", ker_seed, "Recorded in the CSV header");

  auto* chn = app.add_subcommand("chain", "Export embedded/observation chains");
  ModelFlags chn_model;
  chn_model.attach(chn);
  std::string chn_x0 = "1";
  double chn_horizon = 100.0;
  std::uint64_t chn_seed = 0;
  std::string chn_kind = "embedded";
  std::string chn_out = "chain.csv";
  chn->add_option("--x0", chn_x0, "Initial state (comma separated)");
  chn->add_option("--horizon", chn_horizon, "Time horizon")->check(CLI::PositiveNumber);
  chn->add_option("--seed", chn_seed, "Master seed");
  chn->add_option("--kind", chn_kind, "embedded or observation")
      ->check(CLI::IsMember({"embedded", "observation"}));
  chn->add_option("--out", chn_out, "Output CSV path");

  auto* est = app.add_subcommand("estimate", "Inter-jump density estimation");
  ModelFlags est_model;
  est_model.attach(est);
  EstimateOptions eopt;
  est->add_option("--chain", eopt.chain_path, "Embedded-chain CSV (n,Z,S)");
  est->add_option("--jumps", eopt.jumps, "Simulate a chain with this many jumps");
  est->add_option("--x", eopt.x, "Query point");
  est->add_option("--a-width", eopt.a_width, "Width of the set A around x");
  est->add_option("--blocks", eopt.blocks, "Number of quantile blocks");
  est->add_option("--bandwidth", eopt.bandwidth, "Kernel bandwidth (0 = default rule)");
  est->add_option("--kernel", eopt.kernel, "epanechnikov, triangular or uniform")
      ->check(CLI::IsMember({"epanechnikov", "triangular", "uniform"}));
  est->add_option("--grid", eopt.grid_text, "Evaluation grid start:end[:step]")
      ->required();
  est->add_option("--seed", eopt.seed, "Master seed");
  est->add_option("--out", eopt.out_path, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
    if (sim->parsed()) {
      return run_simulate(sim_model, sim_x0, sim_horizon, sim_paths, sim_seed, sim_out);
    }
    if (dist->parsed()) return run_distance(dopt);
    if (ker->parsed()) return run_kernels(ker_model, ker_points, ker_out, ker_seed);
    if (chn->parsed()) {
      return run_chain(chn_model, chn_x0, chn_horizon, chn_seed, chn_kind, chn_out);
    }
    if (est->parsed()) return run_estimate(est_model, eopt);
    return 1;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
