#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "specflow/core/lattice.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

using ParameterSet = std::map<std::string, double>;

struct ParameterSpec {
  std::string name;
  double default_value = 0.0;
  std::string description;
};

/// Unknown scenario name; carries the closest known name when there is one.
class UnknownScenario : public Error {
 public:
  UnknownScenario(const std::string& name, std::optional<std::string> suggestion);
  const std::optional<std::string>& suggestion() const { return suggestion_; }

 private:
  std::optional<std::string> suggestion_;
};

struct Scenario {
  std::string name;
  std::string description;
  int dimension = 1;
  std::vector<int> extent;
  std::vector<ParameterSpec> parameters;
  double declared_gap = 1.0;
  bool gauge_invariant = false;  // the family commutes with N; enables Goldstone and covariance checks
  bool experimental = false;
  std::function<InteractionFamily(const Lattice&, const ParameterSet&)> builder;
  /// Checks enabled by default_config; empty means every applicable check.
  std::vector<std::string> default_checks = {};

  Lattice default_lattice() const;
  ParameterSet defaults() const;
  /// Defaults overlaid with `overrides`; throws InvalidArgument on unknown names.
  ParameterSet resolve(const ParameterSet& overrides) const;
  InteractionFamily build(const Lattice& lattice, const ParameterSet& overrides = {}) const;
  /// The symmetry generator N for gauge-invariant scenarios.
  std::optional<Interaction> symmetry(const Lattice& lattice) const;

  /// Parameter schema, default gap gate and a ready-to-run config.
  nlohmann::json describe() const;
};

/// Every built-in scenario, sorted by name.
const std::vector<Scenario>& scenario_registry();
std::vector<std::string> list_scenarios();
/// Throws UnknownScenario.
const Scenario& find_scenario(const std::string& name);

}  // namespace specflow
