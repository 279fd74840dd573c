#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "duks/cli/settings.hpp"

namespace duks::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitDivergence = 3,
  kExitCheckFailed = 4,
};

/// A fully specified run: the subcommand, the resolved key map (defaults
/// included) and where to write.
struct RunRequest {
  std::string subcommand;
  ConfigMap config;
  std::filesystem::path out_dir;
  bool progress = false;  // per-(eps, path) lines on stderr
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> outputs;  // file names relative to out_dir, manifest excluded
  std::vector<std::string> messages;  // one line per check, for the console
};

inline constexpr const char* kManifestName = "manifest.json";

/// Runs one subcommand and writes its outputs plus manifest.json. Usage
/// problems surface as ConfigError; divergence and failed checks are
/// reported through the exit code.
RunOutcome run_command(const RunRequest& request);

/// Reconstructs the request recorded in a manifest. `out_dir` replaces the
/// recorded directory when non-empty.
RunRequest request_from_manifest(const std::filesystem::path& manifest,
                                 const std::filesystem::path& out_dir);

/// Entry point of the `duks` executable.
int main_entry(int argc, char** argv);

}  // namespace duks::cli
