#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "specflow/harness/experiment.hpp"

using namespace specflow;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

const CheckResult& check(const RunOutcome& o, const std::string& name) {
  for (const auto& c : o.manifest.checks)
    if (c.name == name) return c;
  throw std::runtime_error("missing check " + name);
}

const Artifact& artifact(const RunOutcome& o, const std::string& file) {
  for (const auto& a : o.artifacts)
    if (a.file == file) return a;
  throw std::runtime_error("missing artifact " + file);
}

ExperimentConfig small(const std::string& scenario, std::vector<std::string> checks, int steps = 8) {
  ExperimentConfig c = default_config(find_scenario(scenario));
  c.grids.steps = steps;
  c.checks.samples = 5;
  c.checks.enabled = std::move(checks);
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("specflow_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Scenarios, ListingIsSortedAndComplete) {
  const auto names = list_scenarios();
  EXPECT_TRUE(std::is_sorted(names.begin(), names.end()));
  for (const char* n : {"constant-family", "hopping-gauge", "kitaev-trivial-path", "lr-chain", "single-site-driver"})
    EXPECT_NE(std::find(names.begin(), names.end(), n), names.end()) << n;
}

TEST(Scenarios, UnknownNameSuggests) {
  try {
    find_scenario("kitaev-trivial-pth");
    FAIL();
  } catch (const UnknownScenario& e) {
    ASSERT_TRUE(e.suggestion());
    EXPECT_EQ(*e.suggestion(), "kitaev-trivial-path");
  }
  try {
    find_scenario("zzzzzzzzzzzzzzzzzzzzzzzzzz");
    FAIL();
  } catch (const UnknownScenario& e) {
    EXPECT_FALSE(e.suggestion());
  }
}

TEST(Scenarios, DescribeRoundTripsToValidConfig) {
  for (const auto& s : scenario_registry()) {
    const auto d = s.describe();
    EXPECT_EQ(d.at("name"), s.name);
    EXPECT_EQ(d.at("parameters").size(), s.parameters.size());
    const ExperimentConfig c = config_from_json(d.at("config"));
    EXPECT_EQ(c.scenario, s.name);
    EXPECT_EQ(config_to_json(c), d.at("config"));
  }
}

TEST(Scenarios, BuildersAreDeterministicAndValid) {
  for (const auto& s : scenario_registry()) {
    if (s.experimental) continue;
    const auto lat = s.default_lattice();
    const auto a = s.build(lat);
    const auto b = s.build(lat);
    for (double t : {0.0, 0.5, 1.0}) {
      a.at(t).validate();
      EXPECT_TRUE((a.at(t).total() - b.at(t).total()).is_zero());
    }
  }
  EXPECT_THROW(find_scenario("hopping-gauge").resolve({{"Jx", 1.0}}), InvalidArgument);
}

TEST(Config, TomlJsonRoundTrip) {
  const std::string toml = R"([scenario]
name = "hopping-gauge"
seed = 7
parameters = { J1 = 0.25 }

[filter]
order = 4
declared_gap = 0.3

[grids]
steps = 16
check_points = [0.1, 0.9]

[checks]
enabled = ["transport", "goldstone"]
samples = 3

[output]
dir = "results"
)";
  const ExperimentConfig c = parse_toml_config(toml);
  EXPECT_EQ(c.scenario, "hopping-gauge");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.parameters.at("J1"), 0.25);
  EXPECT_EQ(c.filter.order, 4);
  EXPECT_EQ(*c.filter.declared_gap, 0.3);
  EXPECT_EQ(c.grids.steps, 16);
  EXPECT_EQ(c.checks.enabled.size(), 2u);
  EXPECT_EQ(c.output.dir, "results");
  const auto j = config_to_json(c);
  const ExperimentConfig back = parse_json_config(j.dump());
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_EQ(back.grids.check_points, c.grids.check_points);
}

TEST(Config, DiagnosticsCarryLineAndField) {
  try {
    parse_toml_config("[scenario]\nname = \"hopping-gauge\"\n\n[grids]\nsteps = \"many\"\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "grids.steps");
    EXPECT_EQ(e.line(), 5);
  }
  try {
    parse_toml_config("[scenario]\nname = \"hopping-gauge\"\n[filter]\nbudgett = 0.5\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "filter.budgett");
    EXPECT_EQ(e.line(), 4);
  }
  try {
    parse_toml_config("[scenario]\nname = \"hoping-gauge\"\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "scenario.name");
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("hopping-gauge"), std::string::npos);
  }
  try {
    parse_toml_config("[scenario\nname = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
  }
  EXPECT_THROW(parse_toml_config("[scenario]\nname = \"lr-chain\"\n[checks]\nenabled = [\"transprt\"]\n"), ConfigError);
  EXPECT_THROW(parse_json_config("{\"scenario\": {\"name\": \"lr-chain\"}, \"grids\": {\"panels\": 6}}"), ConfigError);
  EXPECT_THROW(parse_json_config("{\"scenario\": {\"name\": \"lr-chain\"}, \"grids\": {\"s0\": 1, \"s1\": 0}}"), ConfigError);
}

TEST(Experiment, ConstantFamilyPasses) {
  const auto o = run_experiment(small("constant-family", {"filter", "transport", "od", "goldstone", "gauge-covariance"}));
  EXPECT_EQ(o.exit_code(), 0);
  const auto& t = check(o, "transport");
  EXPECT_EQ(t.status, CheckStatus::pass);
  EXPECT_LE(t.metrics.at("identity_deviation"), 1e-10);
  EXPECT_LE(t.metrics.at("max_transport_error"), 1e-10);
  EXPECT_EQ(o.manifest.derivative_source, "constant");
  EXPECT_EQ(o.manifest.checks.size(), known_checks().size());
  EXPECT_EQ(check(o, "norms").status, CheckStatus::skipped);
}

TEST(Experiment, HoppingGaugeGoldstonePasses) {
  const auto o = run_experiment(small("hopping-gauge", {"goldstone", "gauge-covariance"}, 4));
  EXPECT_EQ(o.exit_code(), 0);
  const auto& g = check(o, "goldstone");
  EXPECT_EQ(g.status, CheckStatus::pass);
  EXPECT_LE(g.metrics.at("projection_commutator"), 1e-8);
  EXPECT_LE(g.metrics.at("invariance"), 1e-6);
  EXPECT_EQ(check(o, "gauge-covariance").status, CheckStatus::pass);
}

TEST(Experiment, GoldstoneRefusesWithoutSymmetry) {
  auto c = small("kitaev-trivial-path", {"goldstone"}, 4);
  c.lattice = LatticeConfig{1, {4}, 1};
  const auto o = run_experiment(c);
  EXPECT_EQ(check(o, "goldstone").status, CheckStatus::refused);
  EXPECT_EQ(o.exit_code(), 0);
}

TEST(Experiment, GapClosingExitsTwoWithoutChecks) {
  auto c = small("kitaev-trivial-path", {"transport", "od", "parallel-transport"});
  c.parameters["mu"] = 2.0;
  c.lattice = LatticeConfig{1, {6}, 1};
  const auto o = run_experiment(c);
  EXPECT_EQ(o.exit_code(), 2);
  ASSERT_TRUE(o.manifest.gate_failure);
  EXPECT_LT(o.manifest.gate_failure->gap, 1.0);
  EXPECT_FALSE(o.manifest.gate_failure->spectrum.empty());
  for (const auto& r : o.manifest.checks) {
    EXPECT_EQ(r.status, CheckStatus::skipped);
    EXPECT_EQ(r.seconds, 0.0);
  }
  ASSERT_EQ(o.artifacts.size(), 1u);
  EXPECT_EQ(o.artifacts[0].file, "spectrum.csv");
}

TEST(Experiment, DeterministicCsvAndSeedOverride) {
  const auto c = small("single-site-driver",
                       {"filter", "norms", "transport", "od", "parallel-transport", "derivative-switch"}, 4);
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  EXPECT_EQ(a.exit_code(), 0);
  ASSERT_EQ(a.artifacts.size(), b.artifacts.size());
  for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
    EXPECT_EQ(a.artifacts[i].file, b.artifacts[i].file);
    EXPECT_EQ(a.artifacts[i].content, b.artifacts[i].content) << a.artifacts[i].file;
  }
  EXPECT_EQ(a.manifest.input_sha256, b.manifest.input_sha256);

  ::setenv("SPECFLOW_SEED", "99", 1);
  const auto e = run_experiment(c);
  ::unsetenv("SPECFLOW_SEED");
  EXPECT_EQ(e.manifest.seed, 99u);
  EXPECT_EQ(e.manifest.seed_source, "SPECFLOW_SEED");
  EXPECT_NE(e.manifest.input_sha256, a.manifest.input_sha256);
  EXPECT_NE(artifact(e, "od.csv").content, artifact(a, "od.csv").content);

  ::setenv("SPECFLOW_SEED", "12x", 1);
  EXPECT_THROW(run_experiment(c), ConfigError);
  ::unsetenv("SPECFLOW_SEED");
}

TEST(Experiment, WritesOutputsAtomically) {
  const auto root = scratch("write");
  const auto o = run_experiment(small("single-site-driver", {"filter", "transport"}, 4));
  const auto dir = write_outcome(o, root, "fixed");
  EXPECT_EQ(dir, root / "single-site-driver" / "fixed");
  const auto again = write_outcome(o, root, "fixed");
  EXPECT_EQ(again, root / "single-site-driver" / "fixed-2");
  for (const auto& entry : fs::directory_iterator(root / "single-site-driver"))
    EXPECT_NE(entry.path().filename().string().front(), '.');
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(manifest.at("exit_code"), 0);
  EXPECT_EQ(manifest.at("checks").size(), known_checks().size());
  EXPECT_EQ(manifest.at("input_sha256").get<std::string>().size(), 64u);
  EXPECT_EQ(slurp(dir / "flow.csv"), artifact(o, "flow.csv").content);
  EXPECT_EQ(slurp(dir / "flow.csv").substr(0, 46), "s,gap,gen_norm,transport_error,quad_residual\r\n");
  fs::remove_all(root);
}

TEST(Experiment, Sha256KnownAnswer) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
