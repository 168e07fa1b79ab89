#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/characteristics.hpp"
#include "pdmp/switching.hpp"
#include "pdmp/tcp.hpp"

namespace pdmp {

/// Plain-text configuration: `key = value` lines under `[section]` headers,
/// `#` comments, whitespace ignored. Values are kept as raw strings until
/// typed access.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, std::string value);

  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  int get_int(const std::string& section, const std::string& key) const;
  std::vector<double> get_vector(const std::string& section,
                                 const std::string& key) const;

  std::optional<std::string> maybe_string(const std::string& section,
                                          const std::string& key) const;

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// A model definition loaded from configuration: either TCP variant or an
/// affine-field switching model.
struct ModelSpec {
  enum class Kind { kTcp, kSwitching };
  Kind kind = Kind::kTcp;
  TcpModel tcp;
  SwitchingModel switching;

  LocalCharacteristics characteristics() const;
  int state_dim() const;
};

/// Builds a model from a [model] section. TCP:
///
///   [model]
///   type = tcp
///   variant = linear   # or constant
///   r = 2.0            # constant variant only
///
/// Switching models use affine fields F^i(y) = A y + b and constant rates:
///
///   [model]
///   type = switching
///   d = 1
///   n = 2
///   [field.0]
///   A = -1
///   b = 1
///   [field.1]
///   A = -1
///   b = -1
///   [rates]
///   bound = 2.0
///   lambda.0.1 = 1.0
///   lambda.1.0 = 1.0
///   [domain]
///   lo = -1.5
///   hi = 1.5
ModelSpec model_from_config(const Config& config);

}  // namespace pdmp
