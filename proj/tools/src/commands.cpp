#include "duks/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "duks/error.hpp"
#include "duks/io.hpp"
#include "duks/version.hpp"

namespace duks::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* order_name(ApproxOrder order) { return order == ApproxOrder::first ? "first" : "second"; }

// JSON has no infinity; a vanishing residual is reported as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json to_json(const ErrorRecord& r) {
  return {{"path", r.path},
          {"seed", r.seed},
          {"eps", r.eps},
          {"aborted", r.aborted},
          {"abort_reason", r.abort_reason},
          {"error_r", r.error_r},
          {"error_r_critical", r.error_r_critical},
          {"error_r_stable", r.error_r_stable},
          {"sup_v", r.sup_v},
          {"sup_u", r.sup_u},
          {"sup_v_l1_bound", r.sup_v_l1_bound}};
}

json to_json(const MetricSummary& m) {
  return {{"median", m.median}, {"p95", m.p95}, {"median_se", m.median_se}};
}

json to_json(const SlopeFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"valid", f.valid}};
}

json to_json(const Interval& i) { return json::array({i.lo, i.hi}); }

json to_json(const OrderFit& f) { return {{"order", finite_or_null(f.order)}, {"vanishes", f.vanishes}}; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double single_eps(const Settings& s, const std::string& subcommand) {
  if (s.eps_list.size() != 1) throw ConfigError("key 'eps': " + subcommand + " takes a single value");
  return s.eps_list.front();
}

std::vector<double> ensemble_eps(const Settings& s, const std::string& subcommand) {
  const std::set<double> distinct(s.eps_list.begin(), s.eps_list.end());
  if (distinct.size() < 3 || distinct.size() != s.eps_list.size()) {
    throw ConfigError("key 'eps': " + subcommand + " needs at least 3 distinct values");
  }
  return s.eps_list;
}

class Writer {
 public:
  explicit Writer(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void write(const std::string& name, std::string_view content) {
    write_file_atomic(dir_ / name, content);
    names_.push_back(name);
  }
  std::vector<std::string> names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

std::string check_line(const std::string& name, bool pass, const std::string& detail) {
  return std::string(pass ? "PASS " : "FAIL ") + name + ": " + detail;
}

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------

RunOutcome cmd_simulate(const Settings& s, Writer& out) {
  RunOutcome outcome;
  SimConfig sim = s.sim.with_eps(single_eps(s, "simulate"));
  sim.validate();
  const NoiseKey key{sim.seed, 0};
  try {
    const Trajectory traj = simulate_path(sim, key);
    const AmplitudeTrajectory amp = integrate_amplitudes(sim.a1, sim.a3, traj.noise, traj.steps);
    ErrorRecord rec = pathwise_error(traj, amp, sim.eps, WeightedNormParams::checked(s.r), s.order);
    rec.seed = key.seed;
    rec.path = key.path;

    out.write("trajectory.csv", trajectory_csv(traj));
    out.write("amplitudes.csv", amplitude_csv(amp));
    json report = {{"manifest", kManifestName}, {"eps", sim.eps},   {"r", s.r},
                   {"order", order_name(s.order)}, {"paths", 1}, {"records", json::array({to_json(rec)})}};
    json quantiles;
    for (const auto& [name, value] : {std::pair{"error_r", rec.error_r}, {"sup_v", rec.sup_v}, {"sup_u", rec.sup_u}}) {
      quantiles[name] = {{"median", value}, {"p95", value}};
    }
    report["quantiles"] = quantiles;
    out.write("error_report.json", dump(report));
    outcome.messages.push_back("E_R = " + fmt(rec.error_r) + ", E_sup_v = " + fmt(rec.sup_v) +
                               ", E_sup_u = " + fmt(rec.sup_u));
  } catch (const DivergenceError& e) {
    const json record = {{"manifest", kManifestName}, {"eps", sim.eps},  {"seed", sim.seed},
                         {"mode", e.mode()},          {"time", e.time()}, {"message", e.what()}};
    out.write("divergence.json", dump(record));
    outcome.exit_code = kExitDivergence;
    outcome.messages.push_back(std::string("divergence: ") + e.what());
  }
  return outcome;
}

RunOutcome cmd_scaling(const Settings& s, Writer& out, bool progress) {
  const std::vector<double> eps_list = ensemble_eps(s, "scaling");
  ScalingOptions options;
  options.paths = s.paths;
  options.workers = s.workers;
  options.order = s.order;
  options.r = s.r;
  options.c2_factor = s.c2_factor;
  options.bootstrap_resamples = s.bootstrap_resamples;
  std::size_t done = 0;
  const std::size_t total = eps_list.size() * static_cast<std::size_t>(s.paths);
  if (progress) {
    options.progress = [&](double eps, std::uint64_t path) {
      std::cerr << "scaling: eps=" << fmt(eps) << " path " << path << " done (" << ++done << "/" << total
                << ")\n";
    };
  }
  const ScalingTable table = epsilon_scaling_study(s.sim, eps_list, options);

  RunOutcome outcome;
  const double slope = table.sup_v_fit.slope;
  const bool slope_ok = table.sup_v_fit.valid && slope >= s.slope_min && slope <= s.slope_max;
  const bool success_ok = table.pooled_success_fraction >= s.min_success;
  const bool spread_ok = table.error_r_spread < s.max_r_spread;

  json rows = json::array();
  for (const ScalingRow& row : table.rows) {
    rows.push_back({{"eps", row.eps},
                    {"paths", row.paths},
                    {"aborted", row.aborted},
                    {"sup_v", to_json(row.sup_v)},
                    {"sup_u", to_json(row.sup_u)},
                    {"error_r", to_json(row.error_r)},
                    {"success_fraction", row.success_fraction},
                    {"success_wilson", to_json(row.success_wilson)}});
  }
  json aborted = json::array();
  std::string csv = "eps,path,seed,aborted,error_r,error_r_critical,error_r_stable,sup_v,sup_u,sup_v_l1_bound\n";
  for (const ErrorRecord& r : table.records) {
    if (r.aborted) aborted.push_back({{"eps", r.eps}, {"seed", r.seed}, {"path", r.path}, {"reason", r.abort_reason}});
    csv += fmt(r.eps) + "," + std::to_string(r.path) + "," + std::to_string(r.seed) + "," +
           (r.aborted ? "1" : "0") + "," + fmt(r.error_r) + "," + fmt(r.error_r_critical) + "," +
           fmt(r.error_r_stable) + "," + fmt(r.sup_v) + "," + fmt(r.sup_u) + "," + fmt(r.sup_v_l1_bound) + "\n";
  }
  json report = {
      {"manifest", kManifestName},
      {"order", order_name(s.order)},
      {"r", s.r},
      {"paths", s.paths},
      {"rows", rows},
      {"fits", {{"sup_v", to_json(table.sup_v_fit)}, {"sup_u", to_json(table.sup_u_fit)}, {"error_r", to_json(table.error_r_fit)}}},
      {"c2_factor", s.c2_factor},
      {"c2", table.c2},
      {"pooled_success_fraction", table.pooled_success_fraction},
      {"pooled_success_wilson", to_json(table.pooled_success_wilson)},
      {"error_r_spread", table.error_r_spread},
      {"aborted_paths", aborted},
      {"checks",
       {{"sup_v_slope", {{"value", slope}, {"min", s.slope_min}, {"max", s.slope_max}, {"pass", slope_ok}}},
        {"success_fraction", {{"value", table.pooled_success_fraction}, {"min", s.min_success}, {"pass", success_ok}}},
        {"error_r_spread", {{"value", table.error_r_spread}, {"max", s.max_r_spread}, {"pass", spread_ok}}}}},
      {"pass", slope_ok && success_ok && spread_ok && aborted.empty()},
  };
  out.write("scaling.json", dump(report));
  out.write("scaling_paths.csv", csv);

  outcome.messages.push_back(check_line("sup_v slope", slope_ok,
                                        fmt(slope) + " in [" + fmt(s.slope_min) + ", " + fmt(s.slope_max) + "]"));
  outcome.messages.push_back(check_line("success fraction", success_ok,
                                        fmt(table.pooled_success_fraction) + " >= " + fmt(s.min_success)));
  outcome.messages.push_back(check_line("E_R spread", spread_ok,
                                        fmt(table.error_r_spread) + " < " + fmt(s.max_r_spread)));
  if (!aborted.empty()) {
    outcome.exit_code = kExitDivergence;
    outcome.messages.push_back(std::to_string(aborted.size()) + " path(s) aborted, see scaling.json");
  } else if (!(slope_ok && success_ok && spread_ok)) {
    outcome.exit_code = kExitCheckFailed;
  }
  return outcome;
}

RunOutcome cmd_ou_check(const Settings& s, Writer& out) {
  const SimConfig sim = s.sim.with_eps(single_eps(s, "ou-check"));
  const OUStatisticsReport report = ou_statistics_check(sim.noise, s.ou);

  json moments = json::array();
  for (const MomentCheck& m : report.moments) {
    moments.push_back({{"k", m.k}, {"t", m.t}, {"empirical", m.empirical}, {"expected", m.expected},
                       {"std_error", m.std_error}, {"pass", m.pass}});
  }
  json tails = json::array();
  for (const TailCheck& c : report.tails) {
    tails.push_back({{"k", c.k}, {"t", c.t}, {"threshold", c.threshold}, {"empirical", c.empirical},
                     {"bound", c.bound}, {"binomial_se", c.binomial_se}, {"pass", c.pass}});
  }
  const StationaryCheck& st = report.stationary;
  const SupremumStatistic& sup = report.supremum;
  const json doc = {
      {"manifest", kManifestName},
      {"eps", sim.eps},
      {"moment_paths", s.ou.moment_paths},
      {"tail_paths", s.ou.tail_paths},
      {"moments", moments},
      {"tails", tails},
      {"stationary", {{"k", st.k}, {"t", st.t}, {"empirical", st.empirical}, {"expected", st.expected},
                      {"relative_error", finite_or_null(st.relative_error)}, {"pass", st.pass}}},
      {"supremum", {{"r", sup.r}, {"horizon", sup.horizon}, {"paths", sup.paths}, {"mean", sup.mean},
                    {"p95", sup.p95}}},
      {"all_pass", report.all_pass},
  };
  out.write("ou_check.json", dump(doc));

  RunOutcome outcome;
  const auto moment_pass = std::count_if(report.moments.begin(), report.moments.end(), [](const MomentCheck& m) { return m.pass; });
  const auto tail_pass = std::count_if(report.tails.begin(), report.tails.end(), [](const TailCheck& c) { return c.pass; });
  outcome.messages.push_back(check_line("moments", moment_pass == static_cast<long>(report.moments.size()),
                                        std::to_string(moment_pass) + "/" + std::to_string(report.moments.size())));
  outcome.messages.push_back(check_line("tails", tail_pass == static_cast<long>(report.tails.size()),
                                        std::to_string(tail_pass) + "/" + std::to_string(report.tails.size())));
  outcome.messages.push_back(check_line("stationary k=2", st.pass, "relative error " + fmt(st.relative_error)));
  outcome.messages.push_back("C_Z^2 estimate (p95): " + fmt(sup.p95));
  if (!report.all_pass) outcome.exit_code = kExitCheckFailed;
  return outcome;
}

RunOutcome cmd_residuals(const Settings& s, Writer& out) {
  const std::vector<double> eps_list = ensemble_eps(s, "residuals");
  const ResidualOrderTable table = residual_order_study(s.sim, eps_list, ResidualOptions{s.paths, s.workers});

  auto meets = [](const OrderFit& f, double min) { return f.vanishes || f.order >= min; };
  RunOutcome outcome;
  bool all = true;
  json checks = json::array();
  auto add_check = [&](const std::string& name, const OrderFit& f, double min) {
    const bool pass = meets(f, min);
    all = all && pass;
    checks.push_back({{"name", name}, {"order", finite_or_null(f.order)}, {"min", min}, {"pass", pass}});
    outcome.messages.push_back(check_line(name, pass, (f.vanishes ? std::string("vanishes") : "order " + fmt(f.order)) +
                                                          " >= " + fmt(min)));
  };
  for (const int k : {0, 1, 3}) add_check("Res(" + std::to_string(k) + ")", table.residual_orders[static_cast<std::size_t>(k)], s.min_order);
  add_check("Res(5)", table.residual_orders[5], s.min_order_mode5);
  for (std::size_t j = 0; j < kSlavedModes.size(); ++j) {
    add_check("integrated Res_r(" + std::to_string(kSlavedModes[j]) + ")", table.integrated_orders[j],
              s.min_integrated_order);
  }

  json rows = json::array();
  for (const ResidualRow& row : table.rows) {
    json sup = json::object();
    for (std::size_t k = 0; k < row.sup_residual.size(); ++k) sup[std::to_string(k)] = row.sup_residual[k];
    json integ = json::object(), drift = json::object(), noise = json::object();
    for (std::size_t j = 0; j < kSlavedModes.size(); ++j) {
      const std::string key = std::to_string(kSlavedModes[j]);
      integ[key] = row.integrated[j];
      drift[key] = row.integrated_drift[j];
      noise[key] = row.integrated_noise[j];
    }
    rows.push_back({{"eps", row.eps}, {"paths", row.paths}, {"sup_residual", sup}, {"integrated", integ},
                    {"integrated_drift", drift}, {"integrated_noise", noise}});
  }
  json orders = json::object();
  for (std::size_t k = 0; k < table.residual_orders.size(); ++k) orders[std::to_string(k)] = to_json(table.residual_orders[k]);
  json integ_orders = json::object(), drift_orders = json::object(), noise_orders = json::object();
  for (std::size_t j = 0; j < kSlavedModes.size(); ++j) {
    const std::string key = std::to_string(kSlavedModes[j]);
    integ_orders[key] = to_json(table.integrated_orders[j]);
    drift_orders[key] = to_json(table.integrated_drift_orders[j]);
    noise_orders[key] = to_json(table.integrated_noise_orders[j]);
  }
  const json doc = {{"manifest", kManifestName},
                    {"paths", s.paths},
                    {"rows", rows},
                    {"residual_orders", orders},
                    {"integrated_orders", integ_orders},
                    {"integrated_drift_orders", drift_orders},
                    {"integrated_noise_orders", noise_orders},
                    {"checks", checks},
                    {"pass", all}};
  out.write("residuals.json", dump(doc));
  if (!all) outcome.exit_code = kExitCheckFailed;
  return outcome;
}

}  // namespace

RunOutcome run_command(const RunRequest& request) {
  const auto started = std::chrono::steady_clock::now();
  const std::string started_utc = utc_now();
  const Settings settings = resolve_settings(request.config);

  Writer out(request.out_dir);
  RunOutcome outcome;
  if (request.subcommand == "simulate") {
    outcome = cmd_simulate(settings, out);
  } else if (request.subcommand == "scaling") {
    outcome = cmd_scaling(settings, out, request.progress);
  } else if (request.subcommand == "ou-check") {
    outcome = cmd_ou_check(settings, out);
  } else if (request.subcommand == "residuals") {
    outcome = cmd_residuals(settings, out);
  } else {
    throw ConfigError("unknown subcommand '" + request.subcommand + "'");
  }
  outcome.outputs = out.names();

  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const json manifest = {
      {"tool", "duks"},
      {"version", std::string(kVersion)},
      {"subcommand", request.subcommand},
      {"seed", settings.sim.seed},
      {"config", request.config},
      {"output_dir", request.out_dir.string()},
      {"outputs", outcome.outputs},
      {"exit_code", outcome.exit_code},
      {"wall_clock", {{"started_utc", started_utc}, {"elapsed_seconds", elapsed}}},
  };
  write_file_atomic(request.out_dir / kManifestName, dump(manifest));
  return outcome;
}

RunRequest request_from_manifest(const fs::path& manifest, const fs::path& out_dir) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot read manifest '" + manifest.string() + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + manifest.string() + "' is not valid JSON: " + e.what());
  }
  if (!doc.contains("subcommand") || !doc.contains("config") || !doc["config"].is_object()) {
    throw ConfigError("manifest '" + manifest.string() + "' lacks subcommand or config");
  }
  RunRequest request;
  request.subcommand = doc["subcommand"].get<std::string>();
  for (const auto& [key, value] : doc["config"].items()) {
    if (!is_known_key(key)) throw ConfigError("unknown key '" + key + "' in manifest");
    if (!value.is_string()) throw ConfigError("key '" + key + "': manifest values must be strings");
    request.config[key] = value.get<std::string>();
  }
  request.config = with_defaults(std::move(request.config), request.subcommand);
  request.out_dir = out_dir.empty() ? fs::path(doc.value("output_dir", std::string("."))) : out_dir;
  return request;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"Stochastic duKS simulations and amplitude-equation checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  struct Sub {
    CLI::App* app = nullptr;
    std::string config_file;
    std::string out_dir;
    bool noise_off = false;
    bool quiet = false;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
  };
  const std::vector<std::pair<std::string, std::string>> names = {
      {"simulate", "run one coupled full/amplitude path"},
      {"scaling", "epsilon scaling study of the approximation error"},
      {"ou-check", "moments and tail bounds of the OU noise"},
      {"residuals", "residual orders along the amplitude ansatz"},
  };
  std::vector<Sub> subs(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    Sub& sub = subs[i];
    sub.app = app.add_subcommand(names[i].first, names[i].second);
    sub.out_dir = "duks-out/" + names[i].first;
    sub.app->add_option("--config", sub.config_file, "key = value config file")->check(CLI::ExistingFile);
    sub.app->add_option("--out-dir", sub.out_dir, "output directory")->capture_default_str();
    sub.app->add_flag("--noise-off", sub.noise_off, "same as --noise.enabled false");
    sub.app->add_flag("--quiet", sub.quiet, "no progress lines");
    for (const KeySpec& key : known_keys()) {
      sub.options[key.name] = sub.app->add_option("--" + key.name, sub.values[key.name], key.help);
    }
  }
  std::string manifest_path;
  std::string rerun_out;
  CLI::App* rerun = app.add_subcommand("rerun", "repeat the run recorded in a manifest");
  rerun->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required()->check(CLI::ExistingFile);
  rerun->add_option("--out-dir", rerun_out, "output directory (default: the recorded one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    RunRequest request;
    if (rerun->parsed()) {
      request = request_from_manifest(manifest_path, rerun_out);
    } else {
      const auto it = std::find_if(subs.begin(), subs.end(), [](const Sub& s) { return s.app->parsed(); });
      const Sub& sub = *it;
      request.subcommand = sub.app->get_name();
      ConfigMap map = sub.config_file.empty() ? ConfigMap{} : read_config_file(sub.config_file);
      for (const auto& [name, option] : sub.options) {
        if (option->count() > 0) map[name] = sub.values.at(name);
      }
      if (sub.noise_off) map["noise.enabled"] = "false";
      request.config = with_defaults(std::move(map), request.subcommand);
      request.out_dir = sub.out_dir;
      request.progress = !sub.quiet;
    }
    const RunOutcome outcome = run_command(request);
    for (const std::string& line : outcome.messages) std::cout << line << "\n";
    std::cout << "wrote " << (request.out_dir / kManifestName).string() << "\n";
    return outcome.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "duks: usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "duks: divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "duks: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace duks::cli
