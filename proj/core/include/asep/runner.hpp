#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asep/config.hpp"

namespace asep {

inline constexpr int kSummarySchemaVersion = 1;

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> outputDir;
  std::optional<std::vector<std::int64_t>> Ns;
  std::optional<std::int64_t> trajectories;
};

void apply_overrides(ExperimentConfig& config, const RunOverrides& overrides);

struct RunOutput {
  std::string csvPath;
  std::string jsonPath;
};

// Runs a validated configuration, writing <output_dir>/<kind>.csv and <output_dir>/summary.json.
RunOutput run_experiment(const ExperimentConfig& config);

// Machine-readable error object: {"error": {"key": ..., "message": ...}}.
std::string error_json(const std::string& key, const std::string& message);

// Loads, validates and runs; returns 0 on success, 2 on configuration errors, 1 on other failures.
// Errors are written to err as a single JSON line.
int run(const std::string& configPath, const RunOverrides& overrides, std::ostream& err);
int run(const std::string& configPath);

}  // namespace asep
