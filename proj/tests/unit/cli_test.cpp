#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "duks/cli/commands.hpp"
#include "duks/cli/settings.hpp"
#include "duks/error.hpp"

namespace duks::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("duks_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunRequest request(const std::string& sub, ConfigMap map, const fs::path& dir) {
  return {sub, with_defaults(std::move(map), sub), dir, false};
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(CliConfig, SectionsAndComments) {
  const ConfigMap m = parse_config_text(
      "# run\n"
      "eps = 0.2   # inline\n"
      "\n"
      "[solver]\n"
      "modes = 16\n"
      "dt=0.005\n"
      "[noise]\n"
      "enabled = false\n");
  EXPECT_EQ(m.at("eps"), "0.2");
  EXPECT_EQ(m.at("solver.modes"), "16");
  EXPECT_EQ(m.at("solver.dt"), "0.005");
  EXPECT_EQ(m.at("noise.enabled"), "false");
  EXPECT_EQ(m.size(), 4u);
  EXPECT_EQ(parse_config_text(to_config_text(m)), m);
}

TEST(CliConfig, DottedKeysWithoutSections) {
  const ConfigMap m = parse_config_text("noise.alpha_exponent = 2\nseed = 7\n");
  EXPECT_EQ(m.at("noise.alpha_exponent"), "2");
  EXPECT_EQ(m.at("seed"), "7");
}

TEST(CliConfig, UnknownKeyNamesKeyAndLine) {
  const std::string msg = message_of([] { parse_config_text("eps = 0.1\n[noise]\nbogus = 1\n"); });
  EXPECT_NE(msg.find("noise.bogus"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_THROW(parse_config_text("eps 0.1\n"), ConfigError);
}

TEST(CliConfig, DefaultsDependOnSubcommand) {
  EXPECT_EQ(with_defaults({}, "simulate").at("eps"), "0.1");
  EXPECT_EQ(with_defaults({}, "scaling").at("eps"), "0.2,0.1,0.05");
  EXPECT_EQ(with_defaults({}, "scaling").at("paths"), "32");
  EXPECT_EQ(with_defaults({}, "residuals").at("paths"), "8");
  EXPECT_EQ(with_defaults({{"eps", "0.3"}}, "simulate").at("eps"), "0.3");
  for (const KeySpec& k : known_keys()) EXPECT_TRUE(with_defaults({}, "simulate").contains(k.name)) << k.name;
}

TEST(CliConfig, ResolvedDefaults) {
  const Settings s = resolve_settings(with_defaults({}, "simulate"));
  EXPECT_EQ(s.sim.eps, 0.1);
  EXPECT_EQ(s.sim.t0, 1.0);
  EXPECT_EQ(s.sim.modes, 32);
  EXPECT_EQ(s.sim.dt, 0.01);
  EXPECT_EQ(s.r, 2.0);
  EXPECT_EQ(s.sim.seed, 1u);
  EXPECT_EQ(s.sim.a1, Complex(1.0, 0.0));
  EXPECT_EQ(s.sim.a3, Complex(0.5, 0.0));
  EXPECT_EQ(s.order, ApproxOrder::first);
  EXPECT_TRUE(s.sim.noise.enabled);
}

TEST(CliConfig, BadValuesNameTheKey) {
  const auto bad = [](const std::string& key, const std::string& value) {
    return message_of([&] { resolve_settings(with_defaults({{key, value}}, "simulate")); });
  };
  EXPECT_NE(bad("solver.dt", "fast").find("solver.dt"), std::string::npos);
  EXPECT_NE(bad("eps", "0.9").find("eps"), std::string::npos);
  EXPECT_NE(bad("order", "third").find("order"), std::string::npos);
  EXPECT_NE(bad("noise.enabled", "maybe").find("noise.enabled"), std::string::npos);
  EXPECT_NE(bad("paths", "0").find("paths"), std::string::npos);
  EXPECT_NE(bad("norm.r", "3.5").find("norm.r"), std::string::npos);
  EXPECT_NE(bad("a1", "1,2,3").find("a1"), std::string::npos);
}

TEST(CliSimulate, WritesThreeOutputsAndManifest) {
  const fs::path dir = scratch("simulate");
  const RunOutcome out = run_command(request("simulate", {{"eps", "0.2"}, {"seed", "7"}, {"solver.modes", "16"}}, dir));
  EXPECT_EQ(out.exit_code, kExitOk);
  EXPECT_EQ(out.outputs, (std::vector<std::string>{"trajectory.csv", "amplitudes.csv", "error_report.json"}));
  for (const std::string& f : out.outputs) EXPECT_TRUE(fs::exists(dir / f)) << f;

  const json manifest = json::parse(slurp(dir / kManifestName));
  EXPECT_EQ(manifest["subcommand"], "simulate");
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_EQ(manifest["config"]["eps"], "0.2");
  EXPECT_EQ(manifest["outputs"].size(), 3u);
  const json report = json::parse(slurp(dir / "error_report.json"));
  EXPECT_EQ(report["manifest"], kManifestName);
  EXPECT_EQ(report["records"][0]["seed"], 7);
  EXPECT_EQ(slurp(dir / "trajectory.csv").rfind("t,k,re_u", 0), 0u);
  for (const auto& entry : fs::directory_iterator(dir)) {
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
  }
}

TEST(CliSimulate, NoiseOffZeroDataIsZero) {
  const fs::path dir = scratch("zero");
  const RunOutcome out = run_command(request(
      "simulate", {{"eps", "0.2"}, {"noise.enabled", "false"}, {"a1", "0"}, {"a3", "0"}, {"solver.modes", "8"}}, dir));
  ASSERT_EQ(out.exit_code, kExitOk);
  std::istringstream csv(slurp(dir / "trajectory.csv"));
  std::string line;
  std::getline(csv, line);
  int rows = 0;
  while (std::getline(csv, line)) {
    std::istringstream cells(line);
    std::string cell;
    for (int c = 0; std::getline(cells, cell, ','); ++c) {
      if (c >= 2) {
        EXPECT_EQ(std::stod(cell), 0.0) << line;
      }
    }
    ++rows;
  }
  EXPECT_GT(rows, 0);
  const json report = json::parse(slurp(dir / "error_report.json"));
  EXPECT_EQ(report["records"][0]["sup_v"], 0.0);
}

TEST(CliSimulate, RerunIsByteIdentical) {
  const fs::path first = scratch("rerun_a"), second = scratch("rerun_b");
  const RunOutcome a = run_command(request("simulate", {{"eps", "0.2"}, {"seed", "3"}, {"solver.modes", "16"}}, first));
  const RunOutcome b = run_command(request_from_manifest(first / kManifestName, second));
  ASSERT_EQ(a.outputs, b.outputs);
  for (const std::string& f : a.outputs) EXPECT_EQ(slurp(first / f), slurp(second / f)) << f;
  json ma = json::parse(slurp(first / kManifestName)), mb = json::parse(slurp(second / kManifestName));
  for (json* m : {&ma, &mb}) {
    m->erase("wall_clock");
    m->erase("output_dir");
  }
  EXPECT_EQ(ma, mb);
}

TEST(CliSimulate, DivergenceExitCode) {
  const fs::path dir = scratch("diverge");
  const RunOutcome out = run_command(
      request("simulate", {{"eps", "0.2"}, {"a1", "1e6"}, {"solver.blowup", "10"}, {"solver.modes", "8"}}, dir));
  EXPECT_EQ(out.exit_code, kExitDivergence);
  EXPECT_TRUE(fs::exists(dir / "divergence.json"));
}

TEST(CliScaling, UsageErrors) {
  const fs::path dir = scratch("scaling_usage");
  EXPECT_THROW(run_command(request("scaling", {{"eps", "0.1"}}, dir)), ConfigError);
  EXPECT_THROW(run_command(request("scaling", {{"eps", "0.2,0.2,0.1"}}, dir)), ConfigError);
  EXPECT_THROW(run_command(request("scaling", {{"paths", "0"}}, dir)), ConfigError);
  EXPECT_THROW(run_command(request("simulate", {{"eps", "0.2,0.1"}}, dir)), ConfigError);
}

TEST(CliOuCheck, ZeroNoiseReportIsZero) {
  const fs::path dir = scratch("ou_zero");
  const RunOutcome out = run_command(request("ou-check",
                                             {{"noise.enabled", "false"},
                                              {"ou.moment_paths", "20"},
                                              {"ou.tail_paths", "10"},
                                              {"ou.supremum_paths", "2"},
                                              {"t0", "0.05"}},
                                             dir));
  const json report = json::parse(slurp(dir / "ou_check.json"));
  ASSERT_FALSE(report["moments"].empty());
  for (const json& m : report["moments"]) EXPECT_EQ(m["empirical"], 0.0);
  for (const json& t : report["tails"]) EXPECT_EQ(t["empirical"], 0.0);
  EXPECT_NE(out.exit_code, kExitUsage);
}

int call_main(std::vector<std::string> args) {
  args.insert(args.begin(), "duks");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return main_entry(static_cast<int>(argv.size()), argv.data());
}

TEST(CliMain, ExitCodes) {
  const fs::path dir = scratch("main");
  EXPECT_EQ(call_main({"simulate", "--no-such-flag"}), kExitUsage);
  EXPECT_EQ(call_main({"scaling", "--paths", "0", "--out-dir", dir.string()}), kExitUsage);
  EXPECT_EQ(call_main({"scaling", "--eps", "0.1", "--out-dir", dir.string()}), kExitUsage);
  EXPECT_EQ(call_main({"simulate", "--eps", "0.2", "--solver.modes", "8", "--quiet", "--out-dir", dir.string()}),
            kExitOk);
  EXPECT_EQ(call_main({"rerun", (dir / kManifestName).string(), "--out-dir", (dir / "again").string()}), kExitOk);
  EXPECT_EQ(slurp(dir / "trajectory.csv"), slurp(dir / "again" / "trajectory.csv"));
}

TEST(CliMain, ConfigFileThenFlags) {
  const fs::path dir = scratch("layering");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.conf");
    cfg << "eps = 0.25\nseed = 5\n[solver]\nmodes = 8\n";
  }
  EXPECT_EQ(call_main({"simulate", "--config", (dir / "run.conf").string(), "--seed", "9", "--out-dir",
                       (dir / "out").string()}),
            kExitOk);
  const json manifest = json::parse(slurp(dir / "out" / kManifestName));
  EXPECT_EQ(manifest["config"]["eps"], "0.25");
  EXPECT_EQ(manifest["config"]["solver.modes"], "8");
  EXPECT_EQ(manifest["config"]["seed"], "9");
}

}  // namespace
}  // namespace duks::cli
