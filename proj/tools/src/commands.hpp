#pragma once

// Subcommands of the sausage-lab tool. Each command validates its config,
// runs, and persists everything under <out>/<command>/<config-hash>/.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace sausage_lab::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
/// The command ran but its check did not pass (oracle-check, validate-field).
inline constexpr int kExitCheckFailed = 3;

struct RunOptions {
    std::filesystem::path out_root = "runs";
    bool dry_run = false;
    std::size_t workers = 0;  ///< 0: SAUSAGE_LAB_WORKERS or hardware concurrency
};

struct CommandInfo {
    std::string name;
    std::string summary;
    std::vector<std::string> keys;
};

/// All commands, in --help order.
const std::vector<CommandInfo>& commands();

/// Fills defaults for `preset` ("reference" or "desk") without touching keys
/// already set. Throws ConfigError for an unknown preset or command.
void apply_preset(ExperimentConfig& cfg, const std::string& preset);

/// Directory a config persists to.
std::filesystem::path run_directory(const ExperimentConfig& cfg, const RunOptions& opts);

struct Outcome {
    int exit_code = kExitOk;
    nlohmann::json document;  ///< result JSON (or the dry-run plan)
    std::filesystem::path run_dir;
};

/// Runs the command; throws sausage_lab::Error on failure.
Outcome execute(const ExperimentConfig& cfg, const RunOptions& opts);

/// execute() plus error handling: prints the result (or an error object) as
/// JSON to `out` and returns the process exit code.
int run(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out);

/// {"error": {"kind": ..., "message": ...}}
nlohmann::json error_json(const std::string& kind, const std::string& message);

}  // namespace sausage_lab::cli
