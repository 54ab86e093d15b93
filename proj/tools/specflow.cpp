#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "specflow/core/format.hpp"
#include "specflow/core/parallel.hpp"
#include "specflow/flow/checks.hpp"
#include "specflow/harness/experiment.hpp"

using namespace specflow;

namespace {

struct RunArgs {
  std::string config;
  int jobs = 0;
  std::string out;
  std::string stamp;
};

void add_run_args(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("config", a.config, "TOML or JSON experiment config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--jobs,-j", a.jobs, "worker threads (default: logical cores)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out,-o", a.out, "output root (default: the config's output.dir)");
  cmd->add_option("--stamp", a.stamp, "run directory name (default: UTC timestamp)");
}

void print_gate_failure(const GateFailure& g) {
  std::fprintf(stderr, "gap gate failed at s = %s: gap %s below declared %s\n", fmt17(g.s).c_str(),
               fmt17(g.gap).c_str(), fmt17(g.declared_gap).c_str());
  std::fprintf(stderr, "lowest levels:");
  for (double e : g.spectrum) std::fprintf(stderr, " %s", fmt17(e).c_str());
  std::fprintf(stderr, "\n");
}

int run_command(const RunArgs& a, std::optional<std::vector<std::string>> checks) {
  set_worker_count(a.jobs);
  const ExperimentConfig config = load_config(a.config);
  RunOptions opts;
  opts.checks = std::move(checks);
  const RunOutcome outcome = run_experiment(config, opts);
  const auto root = a.out.empty() ? std::filesystem::path(config.output.dir) : std::filesystem::path(a.out);
  const auto dir = write_outcome(outcome, root, a.stamp.empty() ? std::nullopt : std::optional(a.stamp));

  const RunManifest& m = outcome.manifest;
  if (m.gate_failure) print_gate_failure(*m.gate_failure);
  for (const auto& c : m.checks) {
    if (c.status == CheckStatus::skipped) continue;
    std::printf("%-22s %-8s %8.2fs  %s\n", c.name.c_str(), to_string(c.status), c.seconds, c.message.c_str());
  }
  std::printf("output: %s\n", dir.string().c_str());
  return outcome.exit_code();
}

int check_filter_command(double gap, int order, double budget, double tol, std::uint64_t seed) {
  const FilterFunction f = FilterFunction::build({gap, order, budget, tol});
  const int panels = f.initial_panels(4.0 * gap);
  double odd = 0.0;
  for (double t : f.rule(panels).nodes) odd = std::max(odd, std::abs(f.W(t) + f.W(-t)));
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 2.0 * gap;
  const double offgap = verify_fourier_offgap(f, h, random_operators(2, 1, seed).front());
  const double norm = f.normalization_residual(panels);
  const bool ok = norm <= 1e-8 && odd == 0.0 && offgap <= 1e-6;
  std::printf("cutoff                 %s\n", fmt17(f.cutoff()).c_str());
  std::printf("panels                 %d\n", panels);
  std::printf("normalization_residual %s\n", fmt17(norm).c_str());
  std::printf("oddness                %s\n", fmt17(odd).c_str());
  std::printf("two_level_offgap       %s\n", fmt17(offgap).c_str());
  std::printf("%s\n", ok ? "pass" : "fail");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral flow experiments on finite fermionic lattices"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);

  RunArgs run_args, lr_args, transport_args, norms_args;
  auto* run = app.add_subcommand("run", "run every check enabled in a config");
  add_run_args(run, run_args);
  auto* lr = app.add_subcommand("lr-profile", "commutator profile and fitted envelope only");
  add_run_args(lr, lr_args);
  auto* tr = app.add_subcommand("transport", "flow transport only");
  add_run_args(tr, transport_args);
  auto* nm = app.add_subcommand("norms", "commutator-bound inequality only");
  add_run_args(nm, norms_args);

  double gap = 1.0, budget = 0.9, tol = 1e-8;
  int order = 6;
  std::uint64_t seed = 1;
  auto* cf = app.add_subcommand("check-filter", "build a filter and report its self-checks");
  cf->add_option("--gap", gap, "gap g")->required()->check(CLI::PositiveNumber);
  cf->add_option("--order", order, "number of sinc² factors")->required()->check(CLI::Range(2, 64));
  cf->add_option("--budget", budget, "Fourier support fraction")->check(CLI::Range(1e-6, 1.0));
  cf->add_option("--tol", tol, "truncated-mass tolerance")->check(CLI::PositiveNumber);
  cf->add_option("--seed", seed, "seed of the two-level test operator");

  auto* ls = app.add_subcommand("list", "list built-in scenarios");
  std::string name;
  auto* ds = app.add_subcommand("describe", "parameter schema and default config of a scenario");
  ds->add_option("name", name, "scenario name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(run_args, std::nullopt);
    if (*lr) return run_command(lr_args, std::vector<std::string>{"lr-profile"});
    if (*tr) return run_command(transport_args, std::vector<std::string>{"transport"});
    if (*nm) return run_command(norms_args, std::vector<std::string>{"norms"});
    if (*cf) return check_filter_command(gap, order, budget, tol, seed);
    if (*ls) {
      for (const auto& s : scenario_registry())
        std::printf("%s%s\n", s.name.c_str(), s.experimental ? " (experimental)" : "");
      return 0;
    }
    if (*ds) {
      std::printf("%s\n", find_scenario(name).describe().dump(2).c_str());
      return 0;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error");
    if (e.line() > 0) std::fprintf(stderr, " at line %d", e.line());
    if (!e.field().empty()) std::fprintf(stderr, " in %s", e.field().c_str());
    std::fprintf(stderr, ": %s\n", e.what());
    return 1;
  } catch (const UnknownScenario& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
