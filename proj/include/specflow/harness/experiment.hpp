#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specflow/harness/config.hpp"

namespace specflow {

/// Reported version of the library and CLI.
const char* software_version();

enum class CheckStatus {
  pass,
  fail,
  refused,  // a hypothesis does not hold for this input; nothing was asserted
  skipped,  // not enabled, or the gap gate stopped the run
};

const char* to_string(CheckStatus status);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  std::map<std::string, double> metrics;
  std::map<std::string, double> tolerances;
  std::string message;
  std::uint64_t seed = 0;
  double seconds = 0.0;
};

struct GateFailure {
  double s = 0.0;
  double gap = 0.0;
  double declared_gap = 0.0;
  std::vector<double> spectrum;  // lowest levels at s
};

struct RunManifest {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::string seed_source;  // "config" or "SPECFLOW_SEED"
  std::string input_sha256;
  std::string derivative_source;  // "analytic", "finite-difference" or "constant"
  double filter_gap = 0.0;
  double filter_cutoff = 0.0;
  std::optional<GateFailure> gate_failure;
  std::vector<CheckResult> checks;  // one entry per known check, in execution order
  std::map<std::string, double> timings;

  int exit_code() const;
  nlohmann::json to_json() const;
};

struct Artifact {
  std::string file;
  std::string content;
};

struct RunOutcome {
  RunManifest manifest;
  std::vector<Artifact> artifacts;  // CSV files, in a fixed order

  /// 0 if no asserted check failed, 1 otherwise, 2 after a gap-gate failure.
  int exit_code() const { return manifest.exit_code(); }
};

struct RunOptions {
  /// Replaces the configured check set when present.
  std::optional<std::vector<std::string>> checks;
  /// Takes precedence over SPECFLOW_SEED and the config seed.
  std::optional<std::uint64_t> seed;
};

/// The seed in effect: SPECFLOW_SEED when set, otherwise the config's.
/// Throws ConfigError on a malformed SPECFLOW_SEED.
std::pair<std::uint64_t, std::string> resolve_seed(const ExperimentConfig& config);

/// Gap gate over the s grid, then the enabled checks. No check runs when any
/// grid point has a computed gap below the declared one.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Writes manifest.json and the CSV artifacts to <root>/<scenario>/<stamp>/.
/// Files are assembled in a hidden sibling directory that is renamed into
/// place, so readers never see a partial run. Returns the final directory.
std::filesystem::path write_outcome(const RunOutcome& outcome, const std::filesystem::path& root,
                                    std::optional<std::string> stamp = {});

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(const std::string& data);

}  // namespace specflow
