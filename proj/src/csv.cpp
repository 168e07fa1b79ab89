#include "pdmp/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pdmp/engine.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/version.hpp"

namespace pdmp {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& s, const char* context) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError(std::string(context) + ": bad numeric field '" + s + "'");
  }
}

bool data_line(const std::string& line) {
  return !line.empty() && line[0] != '#';
}

const char* kind_name(EventKind kind) {
  return kind == EventKind::kBoundaryJump ? "boundary_jump" : "jump";
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  // %.17g round-trips any double; trim to the shortest form that still does.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void write_provenance(std::ostream& out, std::uint64_t seed) {
  out << "# seed=" << seed << " version=" << kVersion << "\n";
}

void write_trajectory_csv_header(std::ostream& out, int dim) {
  out << "path_id,event_index,time,kind";
  for (int k = 0; k < dim; ++k) out << ",coord_" << k;
  out << "\n";
}

void write_trajectory_csv(std::ostream& out, std::uint64_t path_id,
                          const Trajectory& traj) {
  auto row = [&](std::uint64_t index, double time, const char* kind,
                 const State& state) {
    out << path_id << ',' << index << ',' << format_double(time) << ',' << kind;
    for (double v : state) out << ',' << format_double(v);
    out << "\n";
  };
  row(0, 0.0, "init", traj.initial_state);
  for (std::size_t k = 0; k < traj.jump_count(); ++k) {
    row(k + 1, traj.jump_times[k], kind_name(traj.kinds[k]),
        traj.post_jump_states[k]);
  }
  row(traj.jump_count() + 1, traj.horizon, "horizon",
      state_at(traj, traj.horizon));
}

void write_sample_csv(std::ostream& out, const std::vector<double>& values) {
  out << "value\n";
  for (double v : values) out << format_double(v) << "\n";
}

std::vector<double> read_sample_csv(std::istream& in) {
  std::vector<double> values;
  std::string line;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    if (!data_line(line)) continue;
    if (!header_skipped) {
      header_skipped = true;
      // Accept headerless files of raw numbers too.
      try {
        values.push_back(parse_double(split_csv_line(line)[0], "sample"));
      } catch (const IoError&) {
      }
      continue;
    }
    values.push_back(parse_double(split_csv_line(line)[0], "sample"));
  }
  return values;
}

std::vector<double> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sample file: " + path);
  return read_sample_csv(in);
}

void write_embedded_chain_csv(std::ostream& out, const EmbeddedChain& chain) {
  const std::size_t dim = chain.entries.empty() ? 1 : chain.entries[0].z.size();
  if (dim == 1) {
    out << "n,Z,S\n";
  } else {
    out << "n";
    for (std::size_t k = 0; k < dim; ++k) out << ",Z_" << k;
    out << ",S\n";
  }
  for (std::size_t i = 0; i < chain.entries.size(); ++i) {
    out << i;
    for (double v : chain.entries[i].z) out << ',' << format_double(v);
    out << ',' << format_double(chain.entries[i].s) << "\n";
  }
}

EmbeddedChain read_embedded_chain_csv(std::istream& in) {
  EmbeddedChain chain;
  std::string line;
  bool header_seen = false;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    if (!data_line(line)) continue;
    const auto fields = split_csv_line(line);
    if (!header_seen) {
      header_seen = true;
      if (fields.size() < 3) throw IoError("embedded chain: need columns n,Z,S");
      dim = fields.size() - 2;
      continue;
    }
    if (fields.size() != dim + 2) {
      throw IoError("embedded chain: inconsistent column count");
    }
    EmbeddedChain::Entry entry;
    entry.z.reserve(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      entry.z.push_back(parse_double(fields[k + 1], "embedded chain"));
    }
    entry.s = parse_double(fields.back(), "embedded chain");
    chain.entries.push_back(std::move(entry));
  }
  if (!header_seen) throw IoError("embedded chain: empty file");
  return chain;
}

EmbeddedChain read_embedded_chain_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open chain file: " + path);
  return read_embedded_chain_csv(in);
}

void write_observation_chain_csv(std::ostream& out, const ObservationChain& chain) {
  const std::size_t dim = chain.entries.empty() ? 1 : chain.entries[0].state.size();
  out << "n,time,origin";
  for (std::size_t k = 0; k < dim; ++k) out << ",coord_" << k;
  out << "\n";
  for (std::size_t i = 0; i < chain.entries.size(); ++i) {
    const auto& e = chain.entries[i];
    out << i << ',' << format_double(e.time) << ','
        << (e.origin == ObservationOrigin::kJump ? "jump" : "observation");
    for (double v : e.state) out << ',' << format_double(v);
    out << "\n";
  }
}

}  // namespace pdmp
