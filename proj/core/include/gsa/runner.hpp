#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "gsa/config.hpp"
#include "gsa/scenarios.hpp"

namespace gsa {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "GSA_OUTPUT_DIR";

struct RunnerOptions {
    std::optional<std::string> output;  // overrides the config and the environment
    std::optional<double> dt;
    std::optional<double> horizon;
    bool check = false;
    bool quiet = false;
    int jobs = 1;
};

/// Integration options after command-line overrides.
RunOptions effective_options(const RunConfig& config, const RunnerOptions& options);

/// --output, then output.directory, then $GSA_OUTPUT_DIR, then "gsa-output".
std::string output_directory(const RunConfig& config, const RunnerOptions& options);

/// Propagates a custom system and evaluates its observables and checks.
ScenarioReport run_custom(const RunConfig& config, const RunOptions& options);

/// Runs a config without writing anything.
ScenarioReport execute(const RunConfig& config, const RunOptions& options);

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Runs one config and writes its report. Returns kExitCheckFailed when `check` is set and a
/// criterion fails.
int run_command(const RunConfig& config, const RunnerOptions& options, std::ostream& log);

/// Runs every grid point of the sweep (up to `jobs` in parallel), writing one report directory per
/// point plus index.json and index.csv.
int sweep_command(const RunConfig& config, const RunnerOptions& options, std::ostream& log);

}  // namespace gsa
