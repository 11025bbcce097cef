#pragma once

// Experiment runner behind the anosov_lab binary: one JSON config per run,
// flag overrides, manifest/summary/CSV artifacts and fixed exit codes.

#include "anosov/representation.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace anosov::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kBudgetError = 3, kAssertionFailure = 4 };

struct ExperimentConfig {
  std::string command;
  nlohmann::json representation;  // {"family": ..., params} or {"import": path}
  int max_len = 0;                // 0: command default
  int threads = 1;
  std::uint64_t seed = 1;
  std::string precision = "double";  // "double" | "extended" (verify oracles)
  std::string out;                   // empty: no artifacts on disk
  std::uint64_t budget_elements = 0;
  double budget_seconds = 0;
  nlohmann::json tolerances = nlohmann::json::object();
  nlohmann::json params = nlohmann::json::object();  // command-specific keys

  /// Resolved config as JSON (what the manifest echoes).
  nlohmann::json to_json() const;
};

/// Builds a config from JSON; unknown keys (top level, representation,
/// command parameters, tolerances) raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);

/// Families: fuchsian {genus, twist}, hitchin {genus, k}, barbot {genus},
/// so_fuchsian {p}, schottky {rank, lambda}; or {"import": path}.
Representation build_representation(const nlohmann::json& source);

struct Check {
  std::string name;
  double value = 0;
  double threshold = 0;
  std::string relation;  // "<=", ">=", "in", "=="
  bool pass = false;
};

struct RunResult {
  int exit_code = kOk;
  nlohmann::json summary;     // deterministic: no timestamps, no thread counts
  std::vector<Check> checks;
  std::string error;          // message of a caught error
};

/// Runs the command and, when config.out is set, writes manifest.json,
/// summary.json, failures.json (when something failed) and CSV files.
RunResult run(const ExperimentConfig& config);

/// argv front end: anosov_lab [command] [--config file] [flags].
int main_entry(int argc, char** argv);

std::vector<std::string> commands();

}  // namespace anosov::cli
