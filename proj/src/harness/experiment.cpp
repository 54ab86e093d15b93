#include "specflow/harness/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include <nlohmann/json.hpp>

#include "specflow/core/dense.hpp"
#include "specflow/core/format.hpp"
#include "specflow/core/parallel.hpp"
#include "specflow/dynamics/lieb_robinson.hpp"
#include "specflow/flow/checks.hpp"
#include "specflow/flow/spectral_flow.hpp"
#include "specflow/locality/norms.hpp"

#ifndef SPECFLOW_VERSION
#define SPECFLOW_VERSION "0.0.0"
#endif

namespace specflow {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kSpectrumLevels = 8;

// Tolerances asserted by the runner.
constexpr double kOdGroundBlockTol = 1e-6;
constexpr double kOdSplitTol = 1e-7;
constexpr double kFilterNormTol = 1e-8;
constexpr double kFilterOffGapTol = 1e-6;
constexpr double kConstantUnitaryTol = 1e-10;
constexpr double kGaugeTol = 1e-8;
constexpr double kDerivativeSwitchTol = 1e-5;
constexpr double kGoldstoneProjectionTol = 1e-8;
constexpr double kGoldstoneInvarianceTol = 1e-6;
// Largest chain on which the commutator-bound pairs are drawn.
constexpr int kNormsMaxSites = 6;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Per-check seed: the run seed mixed with the check's position.
std::uint64_t check_seed(std::uint64_t seed, std::size_t slot) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(slot)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (std::uint64_t{out[0]} << 32) | out[1];
}

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      out_ << (first ? "" : ",") << h;
      first = false;
    }
    out_ << "\r\n";
  }
  Csv& row(std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto& c : cells) {
      out_ << (first ? "" : ",") << c;
      first = false;
    }
    out_ << "\r\n";
    return *this;
  }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
};

std::string num(double v) { return fmt17(v); }
std::string num(std::size_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

Matrix dense_total(const Interaction& phi) { return to_dense(phi.total()).matrix(); }

struct Context {
  const ExperimentConfig& config;
  const Scenario& scenario;
  Lattice lattice;
  InteractionFamily family;
  std::vector<double> grid;
  std::vector<SpectralData> spectra;
  FilterFunction filter;
  FlowOptions flow_options;
  std::vector<Artifact>& artifacts;
  std::optional<FlowRun> run;

  const FlowRun& flow() {
    if (!run) run = run_flow(family, grid, flow_options);
    return *run;
  }

  // Grid indices nearest to the configured check points.
  std::vector<std::size_t> check_indices() const {
    std::vector<std::size_t> out;
    for (double s : config.grids.check_points) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < grid.size(); ++j)
        if (std::abs(grid[j] - s) < std::abs(grid[best] - s)) best = j;
      out.push_back(best);
    }
    return out;
  }

  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    if (config.grids.panels > 0) q.panels = config.grids.panels;
    return q;
  }
};

void assert_le(CheckResult& r, const std::string& metric, double value, double tol) {
  r.metrics[metric] = value;
  r.tolerances[metric] = tol;
  if (!(value <= tol)) {
    r.status = CheckStatus::fail;
    if (!r.message.empty()) r.message += "; ";
    r.message += metric + " = " + fmt17(value) + " exceeds " + fmt17(tol);
  }
}

void check_filter(Context& ctx, CheckResult& r) {
  const FilterFunction& f = ctx.filter;
  const int panels = f.initial_panels(4.0 * f.gap());
  const auto& rule = f.rule(panels);
  double odd = 0.0;
  for (double t : rule.nodes) odd = std::max(odd, std::abs(f.W(t) + f.W(-t)));
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 2.0 * f.gap();
  const Matrix a = random_operators(2, 1, r.seed).front();
  r.metrics["cutoff"] = f.cutoff();
  r.metrics["panels"] = panels;
  assert_le(r, "normalization_residual", f.normalization_residual(panels), kFilterNormTol);
  assert_le(r, "oddness", odd, 0.0);
  assert_le(r, "two_level_offgap", verify_fourier_offgap(f, h, a), kFilterOffGapTol);
  Csv csv({"t", "w", "W", "V"});
  for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
    const double t = rule.nodes[q];
    csv.row({num(t), num(f.w(t)), num(f.W(t)), num(f.V(t))});
  }
  ctx.artifacts.push_back({"filter.csv", csv.str()});
}

void check_norms(Context& ctx, CheckResult& r) {
  const int sites = std::min(ctx.lattice.num_sites(), kNormsMaxSites);
  const Lattice lat = Lattice::chain(sites);
  const int pairs = ctx.config.checks.samples;
  Csv csv({"pair", "y", "x", "nu", "m", "lhs", "rhs"});
  int violations = 0;
  double worst = 0.0;
  for (int p = 0; p < pairs; ++p) {
    const int y = p % sites;
    const int x = (p * 7 + 3) % sites;
    const auto a = random_quasilocal(lat, r.seed + 2 * static_cast<std::uint64_t>(p), y, 4.0, true);
    const auto b = random_quasilocal(lat, r.seed + 2 * static_cast<std::uint64_t>(p) + 1, x, 4.0, p % 3 == 0);
    for (int nu = 0; nu <= 2; ++nu)
      for (int m = 0; m <= 2; ++m) {
        const auto cb = commutator_bound(a, y, b, x, nu, m);
        if (!cb.holds()) ++violations;
        if (cb.rhs > 0.0) worst = std::max(worst, cb.lhs / cb.rhs);
        csv.row({num(p), num(y), num(x), num(nu), num(m), num(cb.lhs), num(cb.rhs)});
      }
  }
  r.metrics["sites"] = sites;
  r.metrics["pairs"] = pairs;
  r.metrics["max_ratio"] = worst;
  assert_le(r, "violations", violations, 0.0);
  ctx.artifacts.push_back({"commutator_bound.csv", csv.str()});
}

void check_lr_profile(Context& ctx, CheckResult& r) {
  const Lattice& lat = ctx.lattice;
  const Interaction h = ctx.family.at(ctx.grid.front());
  const auto a = MajoranaPolynomial::number(lat, 0);
  // One probe per distance from site 0: the first site at that distance.
  std::vector<LrProbe> probes;
  for (int site = 1; site < lat.num_sites(); ++site) {
    const int d = lat.distance(0, site);
    if (std::none_of(probes.begin(), probes.end(), [d](const LrProbe& p) { return p.distance == d; }))
      probes.push_back({d, MajoranaPolynomial::majorana(lat, lat.mode(site, 0, 0))});
  }
  if (probes.empty()) {
    r.status = CheckStatus::refused;
    r.message = "the lattice has a single site";
    return;
  }
  const auto prof = lr_commutator_profile(h, a, probes, ctx.config.grids.lr_times);
  double at_zero = 0.0;
  for (const auto& row : prof.rows)
    if (row.t == 0.0) at_zero = std::max(at_zero, row.commutator_norm);
  r.metrics["fit_c"] = prof.fit.c;
  r.metrics["fit_nu"] = prof.fit.nu;
  r.metrics["min_residual"] = prof.min_residual;
  r.tolerances["min_residual"] = 0.0;
  if (prof.min_residual < 0.0) {
    r.status = CheckStatus::fail;
    r.message = "envelope residual is negative";
  }
  assert_le(r, "t0_commutator", at_zero, 0.0);
  ctx.artifacts.push_back({"lr_profile.csv", prof.to_csv()});
}

void check_transport(Context& ctx, CheckResult& r) {
  const FlowRun& run = ctx.flow();
  r.metrics["panels"] = run.panels;
  r.metrics["steps"] = static_cast<double>(run.grid.size() - 1);
  assert_le(r, "max_transport_error", run.max_transport_error(), ctx.config.checks.transport_tol);
  if (ctx.family.constant()) {
    double dev = 0.0;
    for (const auto& u : run.unitaries)
      dev = std::max(dev, (u - Matrix::Identity(u.rows(), u.cols())).operatorNorm());
    assert_le(r, "identity_deviation", dev, kConstantUnitaryTol);
  }
  ctx.artifacts.push_back({"flow.csv", run.to_csv()});
}

void check_transport_convergence(Context& ctx, CheckResult& r) {
  const auto tc = transport_convergence(ctx.family, ctx.config.grids.steps, ctx.flow_options);
  r.metrics["base_error"] = tc.base_error;
  r.metrics["refined_error"] = tc.refined_error;
  r.metrics["panels"] = tc.panels;
  r.metrics["ratio"] = tc.refined_error > 0.0 ? tc.base_error / tc.refined_error : INFINITY;
  r.tolerances["ratio"] = 2.0;
  r.tolerances["floor"] = tc.floor;
  if (!tc.converging()) {
    r.status = CheckStatus::fail;
    r.message = "refinement did not halve the transport error";
  }
  Csv csv({"steps", "panels", "error"});
  csv.row({num(tc.steps), num(tc.panels), num(tc.base_error)});
  csv.row({num(2 * tc.steps), num(2 * tc.panels), num(tc.refined_error)});
  ctx.artifacts.push_back({"transport_convergence.csv", csv.str()});
}

void check_gauge_covariance(Context& ctx, CheckResult& r) {
  if (!ctx.scenario.gauge_invariant) {
    r.status = CheckStatus::refused;
    r.message = "scenario is not number conserving";
    return;
  }
  assert_le(r, "max_commutator", gauge_covariance(ctx.flow()), kGaugeTol);
}

void check_od(Context& ctx, CheckResult& r) {
  Csv csv({"s", "sample", "od_pp", "d_pq", "od_pq", "split"});
  double block = 0.0, split = 0.0;
  for (std::size_t i : ctx.check_indices()) {
    const Matrix h = dense_total(ctx.family.at(ctx.grid[i]));
    const auto samples = random_operators(h.rows(), ctx.config.checks.samples, r.seed + i);
    std::vector<ODecomposition> parts(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) {
      parts[k] = od_decompose(ctx.filter, h, ctx.spectra[i], samples[k], ctx.quadrature());
    });
    for (std::size_t k = 0; k < parts.size(); ++k) {
      const auto gb = parts[k].ground_block(ctx.spectra[i]);
      const double sr = parts[k].split_residual();
      block = std::max(block, gb.max());
      split = std::max(split, sr);
      csv.row({num(ctx.grid[i]), num(k), num(gb.od_pp), num(gb.d_pq), num(gb.od_pq), num(sr)});
    }
  }
  assert_le(r, "ground_block", block, kOdGroundBlockTol);
  assert_le(r, "split_residual", split, kOdSplitTol);
  ctx.artifacts.push_back({"od.csv", csv.str()});
}

void check_parallel_transport(Context& ctx, CheckResult& r) {
  const FlowRun& run = ctx.flow();
  Csv csv({"s", "max_diagonal", "max_plain", "bound"});
  double worst = 0.0;
  for (std::size_t i : ctx.check_indices()) {
    const auto samples = random_operators(run.spectra[i].vectors.rows(), ctx.config.checks.samples, r.seed + i);
    const auto pt = parallel_transport_check(run, i, samples);
    worst = std::max(worst, pt.max_diagonal - pt.bound);
    csv.row({num(run.grid[i]), num(pt.max_diagonal), num(pt.max_plain), num(pt.bound)});
    if (!pt.pass()) {
      r.status = CheckStatus::fail;
      r.message = "diagonal part has a ground-state response at s = " + fmt17(run.grid[i]);
    }
  }
  r.metrics["max_excess"] = worst;
  r.tolerances["max_excess"] = 0.0;
  ctx.artifacts.push_back({"parallel_transport.csv", csv.str()});
}

void check_derivative_switch(Context& ctx, CheckResult& r) {
  const FlowRun& run = ctx.flow();
  Csv csv({"s", "residual"});
  double worst = 0.0;
  for (std::size_t i : ctx.check_indices()) {
    const auto samples = random_operators(run.spectra[i].vectors.rows(), ctx.config.checks.samples, r.seed + i);
    const double res = derivative_switch_check(run, i, samples);
    worst = std::max(worst, res);
    csv.row({num(run.grid[i]), num(res)});
  }
  assert_le(r, "max_residual", worst, kDerivativeSwitchTol);
  ctx.artifacts.push_back({"derivative_switch.csv", csv.str()});
}

void check_goldstone(Context& ctx, CheckResult& r) {
  const auto sym = ctx.scenario.symmetry(ctx.lattice);
  if (!sym) {
    r.status = CheckStatus::refused;
    r.message = "scenario declares no symmetry";
    return;
  }
  Csv csv({"s", "hypothesis", "projection_commutator", "invariance"});
  double proj = 0.0, inv = 0.0, hyp = 0.0;
  for (std::size_t i : ctx.check_indices()) {
    const Interaction h = ctx.family.at(ctx.grid[i]);
    const auto dim = static_cast<Eigen::Index>(ctx.lattice.hilbert_dim());
    const auto samples = random_operators(dim, ctx.config.checks.samples, r.seed + i);
    const auto g = goldstone_check(h, *sym, ctx.config.grids.phases, samples);
    proj = std::max(proj, g.projection_commutator);
    inv = std::max(inv, g.invariance);
    hyp = std::max(hyp, g.hypothesis);
    csv.row({num(ctx.grid[i]), num(g.hypothesis), num(g.projection_commutator), num(g.invariance)});
  }
  r.metrics["hypothesis"] = hyp;
  assert_le(r, "projection_commutator", proj, kGoldstoneProjectionTol);
  assert_le(r, "invariance", inv, kGoldstoneInvarianceTol);
  ctx.artifacts.push_back({"goldstone.csv", csv.str()});
}

using CheckFn = std::function<void(Context&, CheckResult&)>;

const std::map<std::string, CheckFn>& check_table() {
  static const std::map<std::string, CheckFn> table{
      {"filter", check_filter},
      {"norms", check_norms},
      {"lr-profile", check_lr_profile},
      {"transport", check_transport},
      {"transport-convergence", check_transport_convergence},
      {"gauge-covariance", check_gauge_covariance},
      {"od", check_od},
      {"parallel-transport", check_parallel_transport},
      {"derivative-switch", check_derivative_switch},
      {"goldstone", check_goldstone},
  };
  return table;
}

std::string spectrum_csv(const std::vector<double>& grid, const std::vector<SpectralData>& spectra) {
  std::ostringstream out;
  out << "s,gap,degeneracy";
  for (int k = 0; k < kSpectrumLevels; ++k) out << ",E" << k;
  out << "\r\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto& sp = spectra[j];
    out << fmt17(grid[j]) << ',' << fmt17(sp.gap) << ',' << sp.ground_degeneracy;
    for (int k = 0; k < kSpectrumLevels; ++k)
      out << ',' << (k < sp.energies.size() ? fmt17(sp.energies[k]) : std::string());
    out << "\r\n";
  }
  return out.str();
}

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

const char* software_version() { return SPECFLOW_VERSION; }

const char* to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::pass:
      return "pass";
    case CheckStatus::fail:
      return "fail";
    case CheckStatus::refused:
      return "refused";
    case CheckStatus::skipped:
      return "skipped";
  }
  return "unknown";
}

int RunManifest::exit_code() const {
  if (gate_failure) return 2;
  for (const auto& c : checks)
    if (c.status == CheckStatus::fail) return 1;
  return 0;
}

json RunManifest::to_json() const {
  json j;
  j["software_version"] = software_version();
  j["input_sha256"] = input_sha256;
  j["config"] = config_to_json(config);
  j["seed"] = seed;
  j["seed_source"] = seed_source;
  j["derivative_source"] = derivative_source;
  j["filter"] = {{"gap", filter_gap}, {"cutoff", filter_cutoff}};
  if (gate_failure) {
    j["gap_gate"] = {{"status", "fail"},
                     {"s", gate_failure->s},
                     {"gap", gate_failure->gap},
                     {"declared_gap", gate_failure->declared_gap},
                     {"spectrum", gate_failure->spectrum}};
  } else {
    j["gap_gate"] = {{"status", "pass"}};
  }
  j["checks"] = json::array();
  for (const auto& c : checks) {
    j["checks"].push_back({{"name", c.name},
                           {"status", to_string(c.status)},
                           {"metrics", c.metrics},
                           {"tolerances", c.tolerances},
                           {"message", c.message},
                           {"seed", c.seed},
                           {"seconds", c.seconds}});
  }
  j["timings"] = timings;
  j["exit_code"] = exit_code();
  return j;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::pair<std::uint64_t, std::string> resolve_seed(const ExperimentConfig& config) {
  const char* env = std::getenv("SPECFLOW_SEED");
  if (!env || !*env) return {config.seed, "config"};
  const std::string text(env);
  if (text.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("SPECFLOW_SEED", "expected a nonnegative integer, got '" + text + "'");
  try {
    return {std::stoull(text), "SPECFLOW_SEED"};
  } catch (const std::exception&) {
    throw ConfigError("SPECFLOW_SEED", "value out of range: '" + text + "'");
  }
}

RunOutcome run_experiment(const ExperimentConfig& input, const RunOptions& options) {
  const auto t_start = Clock::now();
  validate_config(input);
  ExperimentConfig config = input;
  if (options.checks) {
    config.checks.enabled = *options.checks;
    validate_config(config);
  }

  RunOutcome out;
  RunManifest& m = out.manifest;
  std::tie(m.seed, m.seed_source) = resolve_seed(config);
  if (options.seed) {
    m.seed = *options.seed;
    m.seed_source = "option";
  }
  config.seed = m.seed;
  m.config = config;
  m.input_sha256 = sha256_hex(config_to_json(config).dump() + "\n" + software_version());

  const Scenario& scenario = find_scenario(config.scenario);
  const Lattice lattice = config.resolved_lattice();
  InteractionFamily family = scenario.build(lattice, config.parameters);
  if (config.grids.s0 < family.s0() || config.grids.s1 > family.s1())
    throw ConfigError("grids", "grid leaves the family's parameter interval");
  m.derivative_source = family.constant()                  ? "constant"
                        : family.has_analytic_derivative() ? "analytic"
                                                           : "finite-difference";

  const double declared = config.resolved_gap();
  FlowOptions fo;
  fo.declared_gap = declared;
  fo.clamp_gap = config.filter.clamp_gap;
  fo.filter = FilterParams{effective_gap(declared, config.filter.clamp_gap), config.filter.order,
                           config.filter.budget, config.filter.tol};
  fo.substeps = config.grids.substeps;
  if (config.grids.panels > 0) fo.generator.quadrature.panels = config.grids.panels;

  // Gap gate.
  const auto t_gate = Clock::now();
  const auto grid = uniform_grid(config.grids.s0, config.grids.s1, config.grids.steps);
  std::vector<SpectralData> spectra(grid.size());
  if (family.constant()) {
    const auto sp = diagonalize(family.at(grid.front()));
    std::fill(spectra.begin(), spectra.end(), sp);
  } else {
    parallel_for(grid.size(), [&](std::size_t j) { spectra[j] = diagonalize(family.at(grid[j])); });
  }
  out.artifacts.push_back({"spectrum.csv", spectrum_csv(grid, spectra)});
  m.timings["gap_gate"] = seconds_since(t_gate);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (spectra[j].gap < declared) {
      GateFailure g{grid[j], spectra[j].gap, declared, {}};
      for (Eigen::Index k = 0; k < std::min<Eigen::Index>(kSpectrumLevels, spectra[j].energies.size()); ++k)
        g.spectrum.push_back(spectra[j].energies[k]);
      m.gate_failure = g;
      break;
    }
  }

  const FilterFunction filter = FilterFunction::build(fo.filter);
  m.filter_gap = filter.gap();
  m.filter_cutoff = filter.cutoff();

  Context ctx{config, scenario, lattice, family, grid, spectra, filter, fo, out.artifacts, std::nullopt};
  const auto& table = check_table();
  const auto& enabled = config.checks.enabled;
  std::size_t slot = 0;
  for (const auto& name : known_checks()) {
    CheckResult r;
    r.name = name;
    r.seed = check_seed(m.seed, slot++);
    const bool on = std::find(enabled.begin(), enabled.end(), name) != enabled.end();
    if (!on) {
      r.message = "not enabled";
    } else if (m.gate_failure) {
      r.message = "gap gate failed";
    } else {
      const auto t0 = Clock::now();
      r.status = CheckStatus::pass;
      try {
        table.at(name)(ctx, r);
      } catch (const HypothesisError& e) {
        r.status = CheckStatus::refused;
        r.message = e.what();
      } catch (const GapGateError& e) {
        r.status = CheckStatus::refused;
        r.message = e.what();
      } catch (const ConvergenceError& e) {
        r.status = CheckStatus::fail;
        r.message = e.what();
      }
      r.seconds = seconds_since(t0);
    }
    m.checks.push_back(std::move(r));
  }
  m.timings["total"] = seconds_since(t_start);
  return out;
}

std::filesystem::path write_outcome(const RunOutcome& outcome, const std::filesystem::path& root,
                                    std::optional<std::string> stamp) {
  namespace fs = std::filesystem;
  const fs::path parent = root / outcome.manifest.config.scenario;
  fs::create_directories(parent);
  const std::string base = stamp ? *stamp : utc_stamp();
  fs::path final_dir = parent / base;
  for (int k = 2; fs::exists(final_dir); ++k) final_dir = parent / (base + "-" + std::to_string(k));

  const fs::path staging = parent / ("." + final_dir.filename().string() + ".partial");
  fs::remove_all(staging);
  fs::create_directory(staging);
  try {
    for (const auto& a : outcome.artifacts) write_file(staging / a.file, a.content);
    write_file(staging / "manifest.json", outcome.manifest.to_json().dump(2) + "\n");
    fs::rename(staging, final_dir);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
  return final_dir;
}

}  // namespace specflow
