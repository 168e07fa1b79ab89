#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdmp/chains.hpp"
#include "pdmp/trajectory.hpp"

namespace pdmp {

/// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

/// "# seed=... version=..." comment line carried by every emitted CSV.
void write_provenance(std::ostream& out, std::uint64_t seed);

/// Rows: path_id,event_index,time,kind,coord_0,...,coord_{d-1} with kind in
/// {init, jump, boundary_jump, horizon}. Event 0 is the initial state, the
/// final row the state at the horizon.
void write_trajectory_csv_header(std::ostream& out, int dim);
void write_trajectory_csv(std::ostream& out, std::uint64_t path_id,
                          const Trajectory& traj);

/// Single `value` column.
void write_sample_csv(std::ostream& out, const std::vector<double>& values);
std::vector<double> read_sample_csv(std::istream& in);
std::vector<double> read_sample_file(const std::string& path);

/// Embedded chain rows: n,Z,S (Z splits into Z_0..Z_{d-1} for d > 1).
void write_embedded_chain_csv(std::ostream& out, const EmbeddedChain& chain);
EmbeddedChain read_embedded_chain_csv(std::istream& in);
EmbeddedChain read_embedded_chain_file(const std::string& path);

/// Observation chain rows: n,time,origin,coord_0,...,coord_{d-1}.
void write_observation_chain_csv(std::ostream& out, const ObservationChain& chain);

}  // namespace pdmp
