#include "pdmp/config.hpp"

#include <fstream>
#include <sstream>

#include "pdmp/errors.hpp"

namespace pdmp {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config config;
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') {
        throw IoError("config line " + std::to_string(line_no) + ": unterminated section");
      }
      section = trim(text.substr(1, text.size() - 2));
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw IoError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      throw IoError("config line " + std::to_string(line_no) + ": empty key");
    }
    config.sections_[section][key] = value;
  }
  return config;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse(in);
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto sit = sections_.find(section);
  return sit != sections_.end() && sit->second.count(key) > 0;
}

void Config::set(const std::string& section, const std::string& key,
                 std::string value) {
  sections_[section][key] = std::move(value);
}

std::optional<std::string> Config::maybe_string(const std::string& section,
                                                const std::string& key) const {
  const auto sit = sections_.find(section);
  if (sit == sections_.end()) return std::nullopt;
  const auto kit = sit->second.find(key);
  if (kit == sit->second.end()) return std::nullopt;
  return kit->second;
}

std::string Config::get_string(const std::string& section,
                               const std::string& key) const {
  const auto v = maybe_string(section, key);
  if (!v) throw IoError("config: missing [" + section + "] " + key);
  return *v;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const std::string raw = get_string(section, key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw IoError("config: [" + section + "] " + key + " is not a number: " + raw);
  }
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const double v = get_double(section, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw IoError("config: [" + section + "] " + key + " is not an integer");
  }
  return i;
}

std::vector<double> Config::get_vector(const std::string& section,
                                       const std::string& key) const {
  std::istringstream in(get_string(section, key));
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    if (!token.empty() && token.back() == ',') token.pop_back();
    if (token.empty()) continue;
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw IoError("config: [" + section + "] " + key + " has a bad entry: " + token);
    }
  }
  if (values.empty()) throw IoError("config: [" + section + "] " + key + " is empty");
  return values;
}

LocalCharacteristics ModelSpec::characteristics() const {
  return kind == Kind::kTcp ? tcp_characteristics(tcp)
                            : switching_characteristics(switching);
}

int ModelSpec::state_dim() const {
  return kind == Kind::kTcp ? 1 : switching.d + 1;
}

ModelSpec model_from_config(const Config& config) {
  ModelSpec spec;
  const std::string type = config.get_string("model", "type");
  if (type == "tcp") {
    spec.kind = ModelSpec::Kind::kTcp;
    const std::string variant =
        config.maybe_string("model", "variant").value_or("linear");
    if (variant == "linear") {
      spec.tcp.variant = TcpModel::Variant::kLinearRate;
    } else if (variant == "constant") {
      spec.tcp.variant = TcpModel::Variant::kConstantRate;
      spec.tcp.r = config.get_double("model", "r");
    } else {
      throw IoError("config: unknown tcp variant: " + variant);
    }
    return spec;
  }
  if (type != "switching") throw IoError("config: unknown model type: " + type);

  spec.kind = ModelSpec::Kind::kSwitching;
  SwitchingModel& m = spec.switching;
  m.d = config.get_int("model", "d");
  m.n_modes = config.get_int("model", "n");
  if (m.d < 1 || m.n_modes < 2) throw IoError("config: bad switching dimensions");

  const std::size_t d = static_cast<std::size_t>(m.d);
  for (int i = 0; i < m.n_modes; ++i) {
    const std::string section = "field." + std::to_string(i);
    const std::vector<double> a = config.get_vector(section, "A");
    const std::vector<double> b = config.get_vector(section, "b");
    if (a.size() != d * d || b.size() != d) {
      throw IoError("config: [" + section + "] needs A with d*d entries and b with d");
    }
    m.fields.push_back([a, b, d](const State& y, State& dy) {
      for (std::size_t row = 0; row < d; ++row) {
        double acc = b[row];
        for (std::size_t col = 0; col < d; ++col) acc += a[row * d + col] * y[col];
        dy[row] = acc;
      }
    });
  }

  std::vector<std::vector<double>> rates(
      static_cast<std::size_t>(m.n_modes),
      std::vector<double>(static_cast<std::size_t>(m.n_modes), 0.0));
  for (int i = 0; i < m.n_modes; ++i) {
    for (int j = 0; j < m.n_modes; ++j) {
      if (i == j) continue;
      const std::string key = "lambda." + std::to_string(i) + "." + std::to_string(j);
      if (config.has("rates", key)) {
        rates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            config.get_double("rates", key);
      }
    }
  }
  m.rates = [rates](int i, int j, const State&) {
    return rates[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  };
  m.rate_bound = config.get_double("rates", "bound");

  m.k_lo = config.get_vector("domain", "lo");
  m.k_hi = config.get_vector("domain", "hi");
  if (m.k_lo.size() != d || m.k_hi.size() != d) {
    throw IoError("config: [domain] lo/hi must have d entries");
  }
  if (config.has("model", "ode_step")) {
    m.ode_step = config.get_double("model", "ode_step");
  }
  return spec;
}

}  // namespace pdmp
