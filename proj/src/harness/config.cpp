#include "specflow/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>
#include <toml.hpp>

namespace specflow {
namespace {

using json = nlohmann::json;
using LineMap = std::map<std::string, int>;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Converts a TOML node to JSON, recording the source line of every field.
json toml_to_json(const toml::node& node, const std::string& path, LineMap& lines) {
  lines[path] = static_cast<int>(node.source().begin.line);
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      out[key] = toml_to_json(v, join(path, key), lines);
    }
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (std::size_t i = 0; i < a->size(); ++i)
      out.push_back(toml_to_json(*a->get(i), path + "[" + std::to_string(i) + "]", lines));
    return out;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  throw ConfigError(path, "dates and times are not accepted", lines[path]);
}

class Reader {
 public:
  Reader(const json& root, const LineMap& lines) : root_(root), lines_(lines) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    const auto it = lines_.find(field);
    throw ConfigError(field, msg, it == lines_.end() ? 0 : it->second);
  }

  const json* find(const std::string& section, const std::string& key) const {
    const json* node = &root_;
    if (!section.empty()) {
      const auto it = root_.find(section);
      if (it == root_.end()) return nullptr;
      node = &*it;
    }
    const auto it = node->find(key);
    return it == node->end() ? nullptr : &*it;
  }

  // Rejects keys outside `allowed` so misspellings do not pass silently.
  void only(const std::string& section, std::initializer_list<const char*> allowed) const {
    const json* node = section.empty() ? &root_ : find("", section);
    if (!node) return;
    if (!node->is_object()) fail(section, "expected a table");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : node->items())
      if (!ok.count(k)) fail(join(section, k), "unknown field");
  }

  double number(const std::string& section, const std::string& key, double fallback) const {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_number()) fail(join(section, key), "expected a number");
    return v->get<double>();
  }

  long integer(const std::string& section, const std::string& key, long fallback) const {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) fail(join(section, key), "expected an integer");
    return v->get<long>();
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_boolean()) fail(join(section, key), "expected true or false");
    return v->get<bool>();
  }

  std::string string(const std::string& section, const std::string& key, const std::string& fallback) const {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_string()) fail(join(section, key), "expected a string");
    return v->get<std::string>();
  }

  std::vector<double> numbers(const std::string& section, const std::string& key, std::vector<double> fallback) const {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_array()) fail(join(section, key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) fail(join(section, key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& section, const std::string& key,
                                   std::vector<std::string> fallback) const {
    const json* v = find(section, key);
    if (!v) return fallback;
    if (!v->is_array()) fail(join(section, key), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) fail(join(section, key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back((*v)[i].get<std::string>());
    }
    return out;
  }

  int line(const std::string& field) const {
    const auto it = lines_.find(field);
    return it == lines_.end() ? 0 : it->second;
  }

 private:
  const json& root_;
  const LineMap& lines_;
};

ExperimentConfig read(const json& root, const LineMap& lines) {
  Reader r(root, lines);
  if (!root.is_object()) r.fail("", "expected a table at the top level");
  r.only("", {"scenario", "lattice", "filter", "grids", "checks", "output"});
  r.only("scenario", {"name", "seed", "parameters"});
  r.only("lattice", {"dimension", "extent", "orbitals"});
  r.only("filter", {"order", "budget", "tol", "clamp_gap", "declared_gap"});
  r.only("grids", {"s0", "s1", "steps", "substeps", "panels", "check_points", "lr_times", "phases"});
  r.only("checks", {"enabled", "samples", "transport_tol"});
  r.only("output", {"dir"});

  ExperimentConfig c;
  if (!r.find("scenario", "name")) r.fail("scenario.name", "missing scenario name");
  c.scenario = r.string("scenario", "name", "");
  const long seed = r.integer("scenario", "seed", 1);
  if (seed < 0) r.fail("scenario.seed", "seed must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (const json* params = r.find("scenario", "parameters")) {
    if (!params->is_object()) r.fail("scenario.parameters", "expected a table");
    for (const auto& [k, v] : params->items()) {
      if (!v.is_number()) r.fail("scenario.parameters." + k, "expected a number");
      c.parameters[k] = v.get<double>();
    }
  }

  if (r.find("", "lattice")) {
    LatticeConfig l;
    l.dimension = static_cast<int>(r.integer("lattice", "dimension", 1));
    for (double e : r.numbers("lattice", "extent", {})) {
      if (e != static_cast<int>(e)) r.fail("lattice.extent", "extents must be integers");
      l.extent.push_back(static_cast<int>(e));
    }
    l.orbitals = static_cast<int>(r.integer("lattice", "orbitals", 1));
    c.lattice = l;
  }

  c.filter.order = static_cast<int>(r.integer("filter", "order", c.filter.order));
  c.filter.budget = r.number("filter", "budget", c.filter.budget);
  c.filter.tol = r.number("filter", "tol", c.filter.tol);
  c.filter.clamp_gap = r.boolean("filter", "clamp_gap", c.filter.clamp_gap);
  if (r.find("filter", "declared_gap")) c.filter.declared_gap = r.number("filter", "declared_gap", 0.0);

  c.grids.s0 = r.number("grids", "s0", c.grids.s0);
  c.grids.s1 = r.number("grids", "s1", c.grids.s1);
  c.grids.steps = static_cast<int>(r.integer("grids", "steps", c.grids.steps));
  c.grids.substeps = static_cast<int>(r.integer("grids", "substeps", c.grids.substeps));
  c.grids.panels = static_cast<int>(r.integer("grids", "panels", c.grids.panels));
  c.grids.check_points = r.numbers("grids", "check_points", c.grids.check_points);
  c.grids.lr_times = r.numbers("grids", "lr_times", c.grids.lr_times);
  c.grids.phases = r.numbers("grids", "phases", c.grids.phases);

  c.checks.enabled = r.strings("checks", "enabled", {});
  c.checks.samples = static_cast<int>(r.integer("checks", "samples", c.checks.samples));
  c.checks.transport_tol = r.number("checks", "transport_tol", c.checks.transport_tol);
  c.output.dir = r.string("output", "dir", c.output.dir);

  try {
    validate_config(c);
  } catch (const ConfigError& e) {
    if (e.line() != 0) throw;
    throw ConfigError(e.field(), e.what(), r.line(e.field()));
  }
  return c;
}

}  // namespace

ConfigError::ConfigError(const std::string& field, const std::string& message, int line)
    : Error(message), field_(field), line_(line) {}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"filter",           "norms",           "lr-profile",
                                              "transport",        "transport-convergence",
                                              "gauge-covariance", "od",              "parallel-transport",
                                              "derivative-switch", "goldstone"};
  return names;
}

Lattice ExperimentConfig::resolved_lattice() const {
  if (!lattice) return find_scenario(scenario).default_lattice();
  return Lattice(lattice->dimension, lattice->extent, lattice->orbitals);
}

double ExperimentConfig::resolved_gap() const {
  return filter.declared_gap ? *filter.declared_gap : find_scenario(scenario).declared_gap;
}

void validate_config(const ExperimentConfig& c) {
  const Scenario* scenario = nullptr;
  try {
    scenario = &find_scenario(c.scenario);
  } catch (const UnknownScenario& e) {
    throw ConfigError("scenario.name", e.what());
  }
  try {
    scenario->resolve(c.parameters);
  } catch (const InvalidArgument& e) {
    throw ConfigError("scenario.parameters", e.what());
  }
  if (c.lattice) {
    try {
      c.resolved_lattice();
    } catch (const Error& e) {
      throw ConfigError("lattice", e.what());
    }
  }
  if (c.filter.order < 2) throw ConfigError("filter.order", "filter order must be at least 2");
  if (!(c.filter.budget > 0.0 && c.filter.budget <= 1.0)) throw ConfigError("filter.budget", "budget must lie in (0, 1]");
  if (!(c.filter.tol > 0.0 && c.filter.tol < 1.0)) throw ConfigError("filter.tol", "tolerance must lie in (0, 1)");
  if (c.filter.declared_gap && !(*c.filter.declared_gap > 0.0))
    throw ConfigError("filter.declared_gap", "declared gap must be positive");
  if (!(c.grids.s1 > c.grids.s0)) throw ConfigError("grids.s1", "s1 must exceed s0");
  if (c.grids.steps < 1) throw ConfigError("grids.steps", "steps must be at least 1");
  if (c.grids.substeps < 1) throw ConfigError("grids.substeps", "substeps must be at least 1");
  if (c.grids.panels != 0 && (c.grids.panels < 4 || c.grids.panels % 4 != 0))
    throw ConfigError("grids.panels", "panels must be 0 (adaptive) or a positive multiple of 4");
  for (double s : c.grids.check_points)
    if (s < c.grids.s0 || s > c.grids.s1) throw ConfigError("grids.check_points", "check point outside [s0, s1]");
  for (double t : c.grids.lr_times)
    if (t < 0.0) throw ConfigError("grids.lr_times", "times must be nonnegative");
  const auto& known = known_checks();
  for (const auto& name : c.checks.enabled)
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ConfigError("checks.enabled", "unknown check '" + name + "'");
  if (c.checks.samples < 1) throw ConfigError("checks.samples", "samples must be at least 1");
  if (!(c.checks.transport_tol > 0.0)) throw ConfigError("checks.transport_tol", "tolerance must be positive");
  if (c.output.dir.empty()) throw ConfigError("output.dir", "output directory must not be empty");
}

ExperimentConfig parse_toml_config(const std::string& text, const std::string& source) {
  toml::table table;
  try {
    table = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ConfigError("", std::string(e.description()), static_cast<int>(e.source().begin.line));
  }
  LineMap lines;
  const json root = toml_to_json(table, "", lines);
  return read(root, lines);
}

ExperimentConfig parse_json_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line number.
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError("", source + ": " + e.what(), line);
  }
  return read(root, {});
}

ExperimentConfig config_from_json(const nlohmann::json& j) { return read(j, {}); }

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_json_config(buf.str(), path.string());
  return parse_toml_config(buf.str(), path.string());
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  json j;
  j["scenario"] = {{"name", c.scenario}, {"seed", c.seed}, {"parameters", c.parameters}};
  if (c.lattice)
    j["lattice"] = {{"dimension", c.lattice->dimension}, {"extent", c.lattice->extent}, {"orbitals", c.lattice->orbitals}};
  j["filter"] = {{"order", c.filter.order}, {"budget", c.filter.budget}, {"tol", c.filter.tol},
                 {"clamp_gap", c.filter.clamp_gap}};
  if (c.filter.declared_gap) j["filter"]["declared_gap"] = *c.filter.declared_gap;
  j["grids"] = {{"s0", c.grids.s0},
                {"s1", c.grids.s1},
                {"steps", c.grids.steps},
                {"substeps", c.grids.substeps},
                {"panels", c.grids.panels},
                {"check_points", c.grids.check_points},
                {"lr_times", c.grids.lr_times},
                {"phases", c.grids.phases}};
  j["checks"] = {{"enabled", c.checks.enabled}, {"samples", c.checks.samples}, {"transport_tol", c.checks.transport_tol}};
  j["output"] = {{"dir", c.output.dir}};
  return j;
}

ExperimentConfig default_config(const Scenario& scenario) {
  ExperimentConfig c;
  c.scenario = scenario.name;
  c.parameters = scenario.defaults();
  if (!scenario.default_checks.empty()) {
    c.checks.enabled = scenario.default_checks;
    return c;
  }
  c.checks.enabled = {"filter", "norms", "lr-profile", "transport", "od", "parallel-transport", "derivative-switch"};
  if (scenario.gauge_invariant) {
    c.checks.enabled.push_back("gauge-covariance");
    c.checks.enabled.push_back("goldstone");
  }
  return c;
}

}  // namespace specflow
