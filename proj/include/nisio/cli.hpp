#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "nisio/config.hpp"

namespace nisio::cli {

enum ExitCode : int { kPass = 0, kConfigError = 1, kToleranceFailure = 2 };

struct Options {
  std::string config_path;
  std::optional<std::string> out_dir;  // overrides output_dir
  std::optional<std::uint64_t> seed;   // overrides mc.seed
  bool quiet = false;
};

inline constexpr const char* kArtifactVersion = "0.1.0";

// Each command writes its CSVs and `manifest_<command>.json` into the output
// directory. Exit 2 runs list every violated tolerance with its limit and the
// measured value under "violations".
int cmd_evolve(const config::RunConfig& cfg, bool quiet = false);
int cmd_oracle(const config::RunConfig& cfg, bool quiet = false);
int cmd_convergence(const config::RunConfig& cfg, bool quiet = false);
int cmd_mc(const config::RunConfig& cfg, bool quiet = false);

/// Loads the config, applies overrides and dispatches. Configuration errors
/// (including unreadable files) become exit 1 with a message on stderr.
int run(const std::string& command, const Options& opts);

}  // namespace nisio::cli
