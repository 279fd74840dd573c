#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "duks/landau.hpp"
#include "duks/solver.hpp"
#include "duks/validate.hpp"

namespace duks::cli {

/// One recognised configuration key with its default value as text.
struct KeySpec {
  std::string name;
  std::string fallback;
  std::string help;
};

/// Every key the tool understands, in manifest order. Keys whose default
/// depends on the subcommand (eps, paths) carry an empty fallback.
const std::vector<KeySpec>& known_keys();

bool is_known_key(std::string_view key);

/// Raw key -> value text, after defaults, config file and flags are layered.
using ConfigMap = std::map<std::string, std::string>;

/// Parses `key = value` lines. `[section]` headers prefix the following keys
/// with "section."; '#' starts a comment. Throws ConfigError naming the line
/// or the offending key.
ConfigMap parse_config_text(std::string_view text);

ConfigMap read_config_file(const std::string& path);

/// Renders a map back to the config format (one dotted key per line).
std::string to_config_text(const ConfigMap& map);

/// Fills unset keys with defaults for `subcommand`.
ConfigMap with_defaults(ConfigMap map, std::string_view subcommand);

/// Typed view of a fully resolved map.
struct Settings {
  SimConfig sim;
  std::vector<double> eps_list;
  ApproxOrder order = ApproxOrder::first;
  int paths = 32;
  int workers = 0;
  double r = 2.0;

  double c2_factor = 1.5;
  int bootstrap_resamples = 1000;
  double slope_min = 1.6;
  double slope_max = 2.4;
  double min_success = 0.9;
  double max_r_spread = 3.0;

  double min_order = 3.5;
  double min_order_mode5 = 2.5;
  double min_integrated_order = 0.6;

  OUCheckOptions ou;
};

/// Converts and range-checks every key. Throws ConfigError with the key name.
Settings resolve_settings(const ConfigMap& map);

}  // namespace duks::cli
