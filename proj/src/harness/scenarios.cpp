#include "specflow/harness/scenarios.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "specflow/harness/config.hpp"
#include "specflow/harness/models.hpp"

namespace specflow {
namespace {

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

models::Couplings none() { return {}; }

std::vector<Scenario> make_registry() {
  std::vector<Scenario> r;

  r.push_back(Scenario{
      "constant-family",
      "Number-conserving chain with s-independent couplings; transport is the identity.",
      1,
      {4},
      {{"mu", 2.0, "chemical potential"}, {"J", 0.5, "hopping amplitude"}},
      1.0,
      true,
      false,
      [](const Lattice& lattice, const ParameterSet& p) {
        models::Couplings c;
        c.mu = p.at("mu");
        c.hop = p.at("J");
        return models::linear_family(lattice, c, none());
      }});

  r.push_back(Scenario{
      "hopping-gauge",
      "Staggered hopping chain whose hopping grows linearly in s; commutes with N.",
      1,
      {6},
      {{"mu", 0.0, "chemical potential"},
       {"stagger", 0.5, "staggered on-site potential"},
       {"J0", 1.0, "hopping at s = 0"},
       {"J1", 0.5, "hopping slope"}},
      0.4,
      true,
      false,
      [](const Lattice& lattice, const ParameterSet& p) {
        models::Couplings at0, slope;
        at0.mu = p.at("mu");
        at0.stagger = p.at("stagger");
        at0.hop = p.at("J0");
        slope.hop = p.at("J1");
        return models::linear_family(lattice, at0, slope);
      }});

  r.push_back(Scenario{
      "kitaev-trivial-path",
      "Kitaev chain switched on from the atomic limit inside the trivial phase.",
      1,
      {8},
      {{"mu", 3.0, "chemical potential"},
       {"J1", 1.0, "hopping slope"},
       {"Delta1", 1.0, "pairing slope"}},
      1.0,
      false,
      false,
      [](const Lattice& lattice, const ParameterSet& p) {
        models::Couplings at0, slope;
        at0.mu = p.at("mu");
        slope.hop = p.at("J1");
        slope.pair = p.at("Delta1");
        return models::linear_family(lattice, at0, slope);
      }});

  r.push_back(Scenario{
      "lr-chain",
      "Interacting chain with pairing and density coupling, used for propagation bounds.",
      1,
      {10},
      {{"mu", 1.0, "chemical potential"},
       {"J", 1.0, "hopping amplitude"},
       {"Delta", 0.5, "pairing amplitude"},
       {"V", 0.5, "nearest-neighbour density coupling"}},
      0.01,
      false,
      false,
      [](const Lattice& lattice, const ParameterSet& p) {
        models::Couplings c;
        c.mu = p.at("mu");
        c.hop = p.at("J");
        c.pair = p.at("Delta");
        c.density = p.at("V");
        return models::linear_family(lattice, c, none());
      }});
  // The small declared gap makes the filter long; flow checks are opt-in here.
  r.back().default_checks = {"filter", "norms", "lr-profile"};

  r.push_back(Scenario{
      "single-site-driver",
      "One fermion mode with energy 1 + s; the flow generator vanishes.",
      1,
      {1},
      {{"mu0", 1.0, "on-site energy at s = 0"}, {"mu1", 1.0, "on-site energy slope"}},
      0.9,
      true,
      false,
      [](const Lattice& lattice, const ParameterSet& p) {
        models::Couplings at0, slope;
        at0.mu = p.at("mu0");
        slope.mu = p.at("mu1");
        return models::linear_family(lattice, at0, slope);
      }});

  r.push_back(Scenario{
      "square-kitaev",
      "Kitaev-type model on a 3x3 square with pairing switched on along s.",
      2,
      {3, 3},
      {{"mu", 4.0, "chemical potential"},
       {"J1", 0.5, "hopping slope"},
       {"Delta1", 0.5, "pairing slope"}},
      1.0,
      false,
      true,
      [](const Lattice& lattice, const ParameterSet& p) {
        models::Couplings at0, slope;
        at0.mu = p.at("mu");
        slope.hop = p.at("J1");
        slope.pair = p.at("Delta1");
        return models::linear_family(lattice, at0, slope);
      }});

  std::sort(r.begin(), r.end(), [](const Scenario& a, const Scenario& b) { return a.name < b.name; });
  return r;
}

}  // namespace

UnknownScenario::UnknownScenario(const std::string& name, std::optional<std::string> suggestion)
    : Error("unknown scenario '" + name + "'" + (suggestion ? "; did you mean '" + *suggestion + "'?" : "")),
      suggestion_(std::move(suggestion)) {}

Lattice Scenario::default_lattice() const { return Lattice(dimension, extent); }

ParameterSet Scenario::defaults() const {
  ParameterSet out;
  for (const auto& p : parameters) out[p.name] = p.default_value;
  return out;
}

ParameterSet Scenario::resolve(const ParameterSet& overrides) const {
  ParameterSet out = defaults();
  for (const auto& [k, v] : overrides) {
    if (!out.count(k)) {
      std::string known;
      for (const auto& p : parameters) known += (known.empty() ? "" : ", ") + p.name;
      throw InvalidArgument("scenario '" + name + "' has no parameter '" + k + "' (known: " + known + ")");
    }
    out[k] = v;
  }
  return out;
}

InteractionFamily Scenario::build(const Lattice& lattice, const ParameterSet& overrides) const {
  if (lattice.dimension() != dimension)
    throw InvalidArgument("scenario '" + name + "' needs a " + std::to_string(dimension) + "-dimensional lattice");
  return builder(lattice, resolve(overrides));
}

std::optional<Interaction> Scenario::symmetry(const Lattice& lattice) const {
  if (!gauge_invariant) return std::nullopt;
  return models::number_interaction(lattice);
}

nlohmann::json Scenario::describe() const {
  nlohmann::json j;
  j["name"] = name;
  j["description"] = description;
  j["lattice"] = {{"dimension", dimension}, {"extent", extent}, {"orbitals", 1}};
  j["parameters"] = nlohmann::json::array();
  for (const auto& p : parameters)
    j["parameters"].push_back({{"name", p.name}, {"default", p.default_value}, {"description", p.description}});
  j["declared_gap"] = declared_gap;
  j["gauge_invariant"] = gauge_invariant;
  j["experimental"] = experimental;
  j["config"] = config_to_json(default_config(*this));
  return j;
}

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = make_registry();
  return registry;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> out;
  for (const auto& s : scenario_registry()) out.push_back(s.name);
  return out;
}

const Scenario& find_scenario(const std::string& name) {
  const auto& reg = scenario_registry();
  for (const auto& s : reg)
    if (s.name == name) return s;
  std::optional<std::string> best;
  std::size_t best_d = std::max<std::size_t>(3, name.size() / 3) + 1;
  for (const auto& s : reg) {
    const std::size_t d = edit_distance(name, s.name);
    if (d < best_d) {
      best_d = d;
      best = s.name;
    }
  }
  throw UnknownScenario(name, best);
}

}  // namespace specflow
