#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specflow/filter/filter.hpp"
#include "specflow/harness/scenarios.hpp"

namespace specflow {

/// A malformed or inconsistent configuration. `line` is 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& message, int line = 0);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

struct LatticeConfig {
  int dimension = 1;
  std::vector<int> extent;
  int orbitals = 1;
};

struct FilterConfig {
  int order = 6;
  double budget = 0.9;
  double tol = 1e-8;
  bool clamp_gap = true;
  std::optional<double> declared_gap;  // scenario default when empty
};

struct GridConfig {
  double s0 = 0.0;
  double s1 = 1.0;
  int steps = 64;
  int substeps = 1;
  int panels = 0;  // 0: adaptive
  std::vector<double> check_points{0.25, 0.5, 0.75};
  std::vector<double> lr_times{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<double> phases{0.3, 1.1, 2.0, 3.0};
};

struct CheckConfig {
  std::vector<std::string> enabled;
  int samples = 20;
  double transport_tol = 1e-3;
};

struct OutputConfig {
  std::string dir = "out";
};

struct ExperimentConfig {
  std::string scenario;
  ParameterSet parameters;
  std::uint64_t seed = 1;
  std::optional<LatticeConfig> lattice;  // scenario default when empty
  FilterConfig filter;
  GridConfig grids;
  CheckConfig checks;
  OutputConfig output;

  /// The lattice in effect: the configured one or the scenario's default.
  Lattice resolved_lattice() const;
  double resolved_gap() const;
};

/// Every check name the runner understands, in execution order.
const std::vector<std::string>& known_checks();

ExperimentConfig parse_toml_config(const std::string& text, const std::string& source = "config");
ExperimentConfig parse_json_config(const std::string& text, const std::string& source = "config");
ExperimentConfig config_from_json(const nlohmann::json& j);
/// Chooses the parser by extension (.json, otherwise TOML).
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical JSON form; parse_json_config(to_json(c).dump()) reproduces c exactly.
nlohmann::json config_to_json(const ExperimentConfig& c);
/// Checks scenario, parameter names, check names and ranges; throws ConfigError.
void validate_config(const ExperimentConfig& c);

/// A config running every applicable check on the scenario's defaults.
ExperimentConfig default_config(const Scenario& scenario);

}  // namespace specflow
