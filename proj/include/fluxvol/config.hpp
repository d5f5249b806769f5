#pragma once

// Run configuration: a flat `key = value` text format with command-line
// overrides applied on top.

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fluxvol/fields.hpp"
#include "fluxvol/surfaces.hpp"
#include "fluxvol/volume.hpp"

namespace fluxvol {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

using KeyValues = std::map<std::string, std::string>;

struct RunConfig {
  std::string field = "helical";
  AxisymParams axisym;
  HelicalParams helical = HelicalParams::standard();

  std::vector<Method> methods{Method::Thm3p};
  Region region = Region::Inner;
  double psi1 = 0.0;
  double psi2 = -0.006;
  int n = 100;  ///< ladder intervals

  GridSpec grid{0.0, 0.0, 0.335, 0.47, 300, 300, NodePlacement::CellCentred};
  MethodOptions method;
  double clip = 0.0;
  EndpointPolicy endpoint = EndpointPolicy::Extrapolate;
  /// Outer-region totals include the inner and island volumes.
  bool add_enclosed = false;

  std::string output = "volume.csv";
  std::string metadata;  ///< empty: output path + ".json"
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool strict = false;  ///< numerical failures give exit status 2

  void validate() const;
  std::string metadata_path() const { return metadata.empty() ? output + ".json" : metadata; }
};

/// Parses `key = value` lines; '#' starts a comment. Duplicate keys keep the
/// last value.
KeyValues parse_key_values(const std::string& text);

/// Applies every key of `kv` to `base`. Unknown keys and malformed values
/// raise ConfigError naming the key.
RunConfig apply_key_values(const KeyValues& kv, RunConfig base = {});
/// Applies one `key=value` override.
void apply_override(RunConfig& cfg, const std::string& assignment);

KeyValues to_key_values(const RunConfig& cfg);
std::string serialize(const RunConfig& cfg);
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::unique_ptr<FieldModel> make_field(const RunConfig& cfg);

}  // namespace fluxvol
