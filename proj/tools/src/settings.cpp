#include "duks/cli/settings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "duks/error.hpp"

namespace duks::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* what) {
  throw ConfigError("key '" + key + "': " + what + " (got '" + text + "')");
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string_view s = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
    bad_value(key, text, "expected a finite number");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string_view s = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) bad_value(key, text, "expected an integer");
  return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string_view s = trim(text);
  if (s == "true" || s == "1" || s == "on" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "off" || s == "no") return false;
  bad_value(key, text, "expected true or false");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    out.emplace_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const std::string& item : split_list(text)) {
    out.push_back(static_cast<int>(parse_integer(key, item)));
  }
  return out;
}

// "re" or "re,im"
Complex parse_complex(const std::string& key, const std::string& text) {
  const std::vector<std::string> parts = split_list(text);
  if (parts.size() == 1) return {parse_double(key, parts[0]), 0.0};
  if (parts.size() == 2) return {parse_double(key, parts[0]), parse_double(key, parts[1])};
  bad_value(key, text, "expected 're' or 're,im'");
}

int positive_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < 1 || v > 100000000) bad_value(key, text, "expected a positive integer");
  return static_cast<int>(v);
}

double positive_double(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v > 0.0)) bad_value(key, text, "expected a positive number");
  return v;
}

}  // namespace

const std::vector<KeySpec>& known_keys() {
  static const std::vector<KeySpec> keys = {
      {"eps", "", "bifurcation parameter; a comma list for scaling and residuals"},
      {"t0", "1.0", "slow horizon T0 (fast horizon T0/eps^2)"},
      {"seed", "1", "noise seed"},
      {"a1", "1", "A1(0) as 're' or 're,im'"},
      {"a3", "0.5", "A3(0) as 're' or 're,im'"},
      {"order", "first", "ansatz used for E_sup_v: first or second"},
      {"paths", "", "paths per eps (scaling: 32, residuals: 8)"},
      {"workers", "0", "worker threads, 0 = available parallelism"},
      {"solver.modes", "32", "Fourier truncation N"},
      {"solver.dt", "0.01", "fast time step"},
      {"solver.output_interval", "1.0", "fast time between recorded samples"},
      {"solver.blowup", "1e6", "divergence guard on |v(k)|"},
      {"noise.enabled", "true", "switch the additive noise on or off"},
      {"noise.alpha_exponent", "2", "alpha_k = eps^p"},
      {"noise.critical_c_exponent", "1", "c_k = eps^p on modes 1, 3"},
      {"noise.stable_c_exponent", "2", "c_k = eps^p on the other modes"},
      {"noise.colored_theta", "0", "alpha_k decays like (1+k^2)^(-theta/2)"},
      {"norm.r", "2", "weight of the l2_r norm"},
      {"scaling.c2_factor", "1.5", "C2 = factor * median(E_sup_v) / eps^2 at the largest eps"},
      {"scaling.bootstrap_resamples", "1000", "bootstrap resamples for quantile errors"},
      {"scaling.slope_min", "1.6", "lower end of the E_sup_v slope window"},
      {"scaling.slope_max", "2.4", "upper end of the E_sup_v slope window"},
      {"scaling.min_success", "0.9", "required fraction of paths with E_sup_v <= C2 eps^2"},
      {"scaling.max_r_spread", "3", "allowed max/min ratio of the median E_R"},
      {"residuals.min_order", "3.5", "required order on modes 0, 1, 3"},
      {"residuals.min_order_mode5", "2.5", "required order on mode 5"},
      {"residuals.min_integrated_order", "0.6", "required order of the integrated reduced residual"},
      {"ou.moment_modes", "0,1,2,3,4,5,6,10", "modes for the second-moment check"},
      {"ou.moment_times", "0.1,1,10", "times for the second-moment check"},
      {"ou.moment_paths", "10000", "paths for the second-moment check"},
      {"ou.tail_modes", "1,2,5", "modes for the tail check"},
      {"ou.tail_multipliers", "0.25,0.5,1,2", "tail thresholds as multiples of c_k"},
      {"ou.tail_paths", "1000", "paths for the tail check"},
      {"ou.stationary_time", "10", "time at which the k = 2 stationary moment is read"},
      {"ou.stationary_tolerance", "0.05", "relative tolerance of the stationary check"},
      {"ou.supremum_paths", "200", "paths for the C_Z statistic"},
      {"ou.supremum_truncation", "32", "truncation of the C_Z statistic"},
      {"ou.dt", "0.01", "time step of the OU checks"},
  };
  return keys;
}

bool is_known_key(std::string_view key) {
  const auto& keys = known_keys();
  return std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
}

ConfigMap parse_config_text(std::string_view text) {
  ConfigMap map;
  std::string section;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated section header");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key(trim(line.substr(0, eq)));
    if (!section.empty()) key = section + "." + key;
    if (!is_known_key(key)) {
      throw ConfigError("unknown key '" + key + "' (line " + std::to_string(line_no) + ")");
    }
    map[key] = std::string(trim(line.substr(eq + 1)));
  }
  return map;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string to_config_text(const ConfigMap& map) {
  std::string out;
  for (const auto& [key, value] : map) out += key + " = " + value + "\n";
  return out;
}

ConfigMap with_defaults(ConfigMap map, std::string_view subcommand) {
  const bool ensemble = subcommand == "scaling" || subcommand == "residuals";
  for (const KeySpec& k : known_keys()) {
    if (map.contains(k.name)) continue;
    if (k.name == "eps") {
      map[k.name] = ensemble ? "0.2,0.1,0.05" : "0.1";
    } else if (k.name == "paths") {
      map[k.name] = subcommand == "residuals" ? "8" : "32";
    } else {
      map[k.name] = k.fallback;
    }
  }
  return map;
}

Settings resolve_settings(const ConfigMap& map) {
  for (const auto& [key, value] : map) {
    if (!is_known_key(key)) throw ConfigError("unknown key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> const std::string& {
    const auto it = map.find(key);
    if (it == map.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
  };

  Settings s;
  s.eps_list = parse_double_list("eps", get("eps"));
  for (const double e : s.eps_list) {
    if (!(e > 0.0 && e <= 0.5)) bad_value("eps", get("eps"), "every value must lie in (0, 0.5]");
  }

  SimConfig& sim = s.sim;
  sim.eps = s.eps_list.front();
  sim.t0 = positive_double("t0", get("t0"));
  const long long seed = parse_integer("seed", get("seed"));
  if (seed < 0) bad_value("seed", get("seed"), "expected a nonnegative integer");
  sim.seed = static_cast<std::uint64_t>(seed);
  sim.a1 = parse_complex("a1", get("a1"));
  sim.a3 = parse_complex("a3", get("a3"));
  sim.modes = positive_int("solver.modes", get("solver.modes"));
  sim.dt = positive_double("solver.dt", get("solver.dt"));
  sim.output_interval = positive_double("solver.output_interval", get("solver.output_interval"));
  sim.blowup_threshold = positive_double("solver.blowup", get("solver.blowup"));

  NoiseScaling& noise = sim.noise;
  noise.eps = sim.eps;
  noise.enabled = parse_bool("noise.enabled", get("noise.enabled"));
  noise.alpha_exponent = parse_double("noise.alpha_exponent", get("noise.alpha_exponent"));
  noise.critical_c_exponent = parse_double("noise.critical_c_exponent", get("noise.critical_c_exponent"));
  noise.stable_c_exponent = parse_double("noise.stable_c_exponent", get("noise.stable_c_exponent"));
  noise.colored_theta = parse_double("noise.colored_theta", get("noise.colored_theta"));

  const std::string& order = get("order");
  if (order == "first") {
    s.order = ApproxOrder::first;
  } else if (order == "second") {
    s.order = ApproxOrder::second;
  } else {
    bad_value("order", order, "expected first or second");
  }

  s.paths = positive_int("paths", get("paths"));
  const long long workers = parse_integer("workers", get("workers"));
  if (workers < 0 || workers > 4096) bad_value("workers", get("workers"), "expected 0..4096");
  s.workers = static_cast<int>(workers);

  s.r = parse_double("norm.r", get("norm.r"));
  if (!(s.r > 0.5 && s.r < 3.0)) bad_value("norm.r", get("norm.r"), "r must lie in (1/2, 3)");

  s.c2_factor = positive_double("scaling.c2_factor", get("scaling.c2_factor"));
  s.bootstrap_resamples = positive_int("scaling.bootstrap_resamples", get("scaling.bootstrap_resamples"));
  s.slope_min = parse_double("scaling.slope_min", get("scaling.slope_min"));
  s.slope_max = parse_double("scaling.slope_max", get("scaling.slope_max"));
  s.min_success = parse_double("scaling.min_success", get("scaling.min_success"));
  s.max_r_spread = positive_double("scaling.max_r_spread", get("scaling.max_r_spread"));
  s.min_order = parse_double("residuals.min_order", get("residuals.min_order"));
  s.min_order_mode5 = parse_double("residuals.min_order_mode5", get("residuals.min_order_mode5"));
  s.min_integrated_order = parse_double("residuals.min_integrated_order", get("residuals.min_integrated_order"));

  OUCheckOptions& ou = s.ou;
  ou.moment_modes = parse_int_list("ou.moment_modes", get("ou.moment_modes"));
  ou.moment_times = parse_double_list("ou.moment_times", get("ou.moment_times"));
  ou.moment_paths = positive_int("ou.moment_paths", get("ou.moment_paths"));
  ou.tail_modes = parse_int_list("ou.tail_modes", get("ou.tail_modes"));
  ou.tail_multipliers = parse_double_list("ou.tail_multipliers", get("ou.tail_multipliers"));
  ou.tail_paths = positive_int("ou.tail_paths", get("ou.tail_paths"));
  ou.stationary_time = positive_double("ou.stationary_time", get("ou.stationary_time"));
  ou.stationary_tolerance = positive_double("ou.stationary_tolerance", get("ou.stationary_tolerance"));
  ou.supremum_paths = positive_int("ou.supremum_paths", get("ou.supremum_paths"));
  ou.supremum_truncation = positive_int("ou.supremum_truncation", get("ou.supremum_truncation"));
  ou.dt = positive_double("ou.dt", get("ou.dt"));
  for (const int k : ou.moment_modes) {
    if (k < 0) bad_value("ou.moment_modes", get("ou.moment_modes"), "modes must be nonnegative");
  }
  for (const int k : ou.tail_modes) {
    if (k < 0) bad_value("ou.tail_modes", get("ou.tail_modes"), "modes must be nonnegative");
  }
  for (const double m : ou.tail_multipliers) {
    if (!(m > 0.0)) bad_value("ou.tail_multipliers", get("ou.tail_multipliers"), "multipliers must be positive");
  }
  ou.tail_horizon = sim.t0 / (sim.eps * sim.eps);
  ou.r = s.r;
  ou.seed = sim.seed;
  ou.workers = s.workers;
  return s;
}

}  // namespace duks::cli
