#include "doctest.h"

#include <cstdlib>
#include <sstream>
#include <string>

#include "pdmp/config.hpp"
#include "pdmp/csv.hpp"
#include "pdmp/engine.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/tcp.hpp"
#include "pdmp/version.hpp"

using namespace pdmp;

namespace {

const char* kTwoWellsConfig = R"(
# two pull fields, symmetric switching
[model]
type = switching
d = 1
n = 2

[field.0]
A = -1
b = 1

[field.1]
A = -1
b = -1

[rates]
bound = 2.0
lambda.0.1 = 1.0
lambda.1.0 = 1.0

[domain]
lo = -1.5
hi = 1.5
)";

}  // namespace

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, 1e-17, -3.25e8, 0.0, 123456.789012345}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
  CHECK(format_double(2.0) == "2");  // integers print without noise
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "top = 1\n"
      "[alpha]\n"
      "x = 2.5  # trailing comment\n"
      "name = linear\n"
      "vec = 1 2, 3\n"
      "\n"
      "[beta]\n"
      "x = -4\n");
  Config c = Config::parse(in);
  CHECK(c.get_double("", "top") == 1.0);
  CHECK(c.get_double("alpha", "x") == 2.5);
  CHECK(c.get_string("alpha", "name") == "linear");
  CHECK(c.get_vector("alpha", "vec") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.get_int("beta", "x") == -4);
  CHECK_FALSE(c.has("beta", "y"));
  CHECK_THROWS_AS(c.get_string("beta", "y"), IoError);
  CHECK_THROWS_AS(c.get_int("alpha", "x"), IoError);

  c.set("beta", "x", "9");  // command-line style override
  CHECK(c.get_int("beta", "x") == 9);

  std::istringstream bad("key value\n");
  CHECK_THROWS_AS(Config::parse(bad), IoError);
}

TEST_CASE("trajectory CSV layout") {
  Trajectory traj;
  traj.initial_state = {1.0};
  traj.inter_jump_times = {2.0};
  traj.jump_times = {2.0};
  traj.post_jump_states = {{1.5}};
  traj.kinds = {EventKind::kJump};
  traj.horizon = 3.0;
  const auto chars = tcp_characteristics();
  traj.chars = &chars;

  std::ostringstream out;
  write_trajectory_csv_header(out, 1);
  write_trajectory_csv(out, 4, traj);
  CHECK(out.str() ==
        "path_id,event_index,time,kind,coord_0\n"
        "4,0,0,init,1\n"
        "4,1,2,jump,1.5\n"
        "4,2,3,horizon,2.5\n");
}

TEST_CASE("sample CSV round-trips") {
  const std::vector<double> values{0.25, 1.0 / 7.0, 3e-5};
  std::ostringstream out;
  write_sample_csv(out, values);
  std::istringstream in(out.str());
  CHECK(read_sample_csv(in) == values);

  std::istringstream headerless("0.5\n0.75\n");
  CHECK(read_sample_csv(headerless) == std::vector<double>{0.5, 0.75});
}

TEST_CASE("embedded chain CSV round-trips") {
  const auto chars = tcp_characteristics();
  RandomStream stream(3, 0);
  const Trajectory traj = simulate(chars, {1.0}, 20.0, stream);
  const EmbeddedChain chain = embedded_chain(traj);

  std::ostringstream out;
  write_provenance(out, 3);
  write_embedded_chain_csv(out, chain);
  std::istringstream in(out.str());
  const EmbeddedChain back = read_embedded_chain_csv(in);
  REQUIRE(back.size() == chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    CHECK(back.entries[i].z == chain.entries[i].z);
    CHECK(back.entries[i].s == chain.entries[i].s);
  }
}

TEST_CASE("provenance comment") {
  std::ostringstream out;
  write_provenance(out, 77);
  CHECK(out.str() == std::string("# seed=77 version=") + kVersion + "\n");
}

TEST_CASE("tcp model from config") {
  std::istringstream in("[model]\ntype = tcp\nvariant = constant\nr = 2.5\n");
  const ModelSpec spec = model_from_config(Config::parse(in));
  CHECK(spec.kind == ModelSpec::Kind::kTcp);
  const auto chars = spec.characteristics();
  CHECK(chars.jump_rate({1.0}) == 2.5);

  std::istringstream plain("[model]\ntype = tcp\n");
  CHECK(model_from_config(Config::parse(plain)).tcp.variant ==
        TcpModel::Variant::kLinearRate);

  std::istringstream bad("[model]\ntype = mystery\n");
  CHECK_THROWS_AS(model_from_config(Config::parse(bad)), IoError);
}

TEST_CASE("switching model from config simulates") {
  std::istringstream in(kTwoWellsConfig);
  const ModelSpec spec = model_from_config(Config::parse(in));
  CHECK(spec.kind == ModelSpec::Kind::kSwitching);
  CHECK(spec.state_dim() == 2);

  const auto chars = spec.characteristics();
  RandomStream stream(8, 0);
  const Trajectory traj = simulate(chars, {0.0, 0.0}, 50.0, stream);
  CHECK(traj.jump_count() > 10);
  for (const auto& z : traj.post_jump_states) {
    CHECK(std::abs(z[0]) <= 1.0 + 1e-9);
    const double mode = z[1];
    CHECK((mode == 0.0 || mode == 1.0));
  }

  // The trailing mode coordinate serializes as a bare integer.
  std::ostringstream out;
  write_trajectory_csv_header(out, 2);
  write_trajectory_csv(out, 0, traj);
  const std::string text = out.str();
  const auto first_jump = text.find("jump,");
  REQUIRE(first_jump != std::string::npos);
  const auto line_end = text.find('\n', first_jump);
  const std::string tail = text.substr(first_jump, line_end - first_jump);
  const char last = tail.back();
  CHECK((last == '0' || last == '1'));
  CHECK(tail[tail.size() - 2] == ',');
}
