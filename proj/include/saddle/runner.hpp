#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace saddle {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalidConfig = 2,
  kExitNotAdmissible = 3,
  kExitNonConvergent = 4,
};

struct RunRequest {
  std::string command;
  std::string config_path;  // optional for verify
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config
  int threads = 1;
};

const std::vector<std::string>& commands();

/// Runs one subcommand, writes <command>.csv, summary.json and manifest.json
/// into out_dir and returns the exit code. Progress goes to log.
int run(const RunRequest& request, std::ostream& log);

}  // namespace saddle
