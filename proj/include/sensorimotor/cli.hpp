#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sensorimotor/harness.hpp"

namespace sensorimotor::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitIo = 3;

// Default output directory when --out is not given.
inline constexpr const char* kOutDirEnv = "SENSORIMOTOR_OUT_DIR";

enum class Subcommand { Run, Compare, Validate };

struct CliConfig {
  Subcommand subcommand = Subcommand::Run;
  std::optional<std::filesystem::path> config_path;
  std::vector<std::string> overrides;  // key=value
  std::filesystem::path out_dir = "out";
  ExperimentConfig experiment;
  std::vector<std::uint64_t> seeds;  // compare only
  std::vector<ControllerKind> kinds;  // compare only
  unsigned threads = 0;
  bool dump_model = false;
};

/// Parses argv (without the program name). Precedence, lowest first:
/// built-in defaults, --config file, --set key=value, dedicated flags.
/// Throws UsageError on unknown flags, keys or malformed values.
CliConfig parse_args(std::span<const std::string> args);

/// Keys accepted by --set and the JSON config file.
std::span<const std::string_view> setting_keys();
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path);

/// Full front end; returns the process exit code.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace sensorimotor::cli
