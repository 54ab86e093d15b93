#include "specflow/flow/spectral_flow.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "specflow/core/dense.hpp"
#include "specflow/core/format.hpp"
#include "specflow/core/parallel.hpp"

namespace specflow {
namespace {

GeneratorSample generator_from(const FilterFunction& f, const InteractionFamily& family, double s,
                               SpectralData spectrum, const GeneratorOptions& opts) {
  if (!family.constant() && !family.has_analytic_derivative() && !opts.allow_finite_difference)
    throw InvalidArgument("family has no analytic derivative and finite differences are disabled");
  const Matrix hdot = to_dense(family.derivative(s, opts.fd_step).total()).matrix();
  const auto k = filter_kernel(f, spectrum, FilterMode::W, opts.quadrature);
  GeneratorSample out;
  out.s = s;
  out.generator = -k.apply(spectrum, hdot);
  out.quad_residual = max_norm(out.generator + k.apply_coarse(spectrum, hdot));
  out.panels = k.panels;
  out.spectrum = std::move(spectrum);
  return out;
}

void require_hermitian(const Matrix& d, double s) {
  const double err = max_norm(d - d.adjoint());
  if (err > 1e-9)
    throw InvalidArgument("flow generator at s = " + fmt17(s) + " is not Hermitian (" + fmt17(err) + ")");
}

}  // namespace

GeneratorSample flow_generator(const FilterFunction& f, const InteractionFamily& family, double s,
                               const GeneratorOptions& opts) {
  return generator_from(f, family, s, diagonalize(family.at(s)), opts);
}

Matrix FlowRun::between(std::size_t i, std::size_t j) const {
  return unitaries.at(i).adjoint() * unitaries.at(j);
}

double FlowRun::max_transport_error() const {
  double m = 0.0;
  for (const auto& p : points) m = std::max(m, p.transport_error);
  return m;
}

std::string FlowRun::to_csv() const {
  std::ostringstream out;
  out << "s,gap,gen_norm,transport_error,quad_residual\r\n";
  for (const auto& p : points)
    out << fmt17(p.s) << ',' << fmt17(p.gap) << ',' << fmt17(p.gen_norm) << ',' << fmt17(p.transport_error) << ','
        << fmt17(p.quad_residual) << "\r\n";
  return out.str();
}

std::vector<double> uniform_grid(double s0, double s1, int steps) {
  if (steps < 1) throw InvalidArgument("grid needs at least one step");
  if (!(s1 > s0)) throw InvalidArgument("grid end must exceed its start");
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (int j = 0; j <= steps; ++j) grid[static_cast<std::size_t>(j)] = s0 + (s1 - s0) * j / steps;
  grid.back() = s1;
  return grid;
}

std::vector<SpectralData> gap_gate(const InteractionFamily& family, const std::vector<double>& grid,
                                   double declared_gap) {
  std::vector<SpectralData> spectra(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) { spectra[j] = diagonalize(family.at(grid[j])); });
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (spectra[j].gap >= declared_gap) continue;
    const auto& e = spectra[j].energies;
    std::vector<double> low(e.data(), e.data() + std::min<Eigen::Index>(e.size(), 8));
    std::ostringstream msg;
    msg << "gap gate failed at s = " << fmt17(grid[j]) << ": gap " << fmt17(spectra[j].gap) << " < declared "
        << fmt17(declared_gap) << "; lowest levels";
    for (double v : low) msg << ' ' << fmt17(v);
    throw GapGateError(msg.str(), grid[j], spectra[j].gap, std::move(low));
  }
  return spectra;
}

FlowRun run_flow(const InteractionFamily& family, std::vector<double> grid, const FlowOptions& opts) {
  if (grid.empty()) throw InvalidArgument("flow grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw InvalidArgument("flow grid must be strictly increasing");
  if (grid.front() < family.s0() || grid.back() > family.s1())
    throw InvalidArgument("flow grid leaves the family's parameter interval");
  if (opts.substeps < 1) throw InvalidArgument("substeps must be at least 1");

  FlowRun run{family, opts.filter, 0, opts.substeps, std::move(grid), {}, {}, {}, {}};
  run.filter.gap = effective_gap(opts.declared_gap, opts.clamp_gap);
  const FilterFunction f = FilterFunction::build(run.filter);
  auto spectra = gap_gate(family, run.grid, opts.declared_gap);

  const std::size_t n = run.grid.size();
  std::vector<GeneratorSample> samples(n);
  parallel_for(n, [&](std::size_t j) { samples[j] = generator_from(f, family, run.grid[j], spectra[j], opts.generator); });
  int panels = 0;
  for (const auto& g : samples) panels = std::max(panels, g.panels);
  GeneratorOptions fixed = opts.generator;
  fixed.quadrature.panels = panels;
  parallel_for(n, [&](std::size_t j) {
    if (samples[j].panels != panels) samples[j] = generator_from(f, family, run.grid[j], spectra[j], fixed);
  });
  run.panels = panels;

  const std::size_t m = static_cast<std::size_t>(opts.substeps);
  std::vector<double> mids;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = (run.grid[j + 1] - run.grid[j]) / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) mids.push_back(run.grid[j] + (static_cast<double>(k) + 0.5) * h);
  }
  std::vector<Matrix> mid_gen(mids.size());
  parallel_for(mids.size(), [&](std::size_t i) {
    mid_gen[i] = flow_generator(f, family, mids[i], fixed).generator;
    require_hermitian(mid_gen[i], mids[i]);
  });

  const Eigen::Index d = spectra.front().energies.size();
  run.unitaries.push_back(Matrix::Identity(d, d));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double h = (run.grid[j + 1] - run.grid[j]) / static_cast<double>(m);
    Matrix u = run.unitaries.back();
    for (std::size_t k = 0; k < m; ++k) u = u * expi_hermitian(mid_gen[j * m + k], h);
    run.unitaries.push_back(std::move(u));
  }

  const Matrix& p0 = spectra.front().ground_projection;
  for (std::size_t j = 0; j < n; ++j) {
    require_hermitian(samples[j].generator, run.grid[j]);
    const Matrix& u = run.unitaries[j];
    FlowPoint p;
    p.s = run.grid[j];
    p.gap = spectra[j].gap;
    p.gen_norm = operator_norm(samples[j].generator);
    p.transport_error = operator_norm(Matrix(u.adjoint() * p0 * u - spectra[j].ground_projection));
    p.quad_residual = samples[j].quad_residual;
    run.points.push_back(p);
    run.generators.push_back(std::move(samples[j].generator));
  }
  run.spectra = std::move(spectra);
  return run;
}

TransportResult transport(const FlowRun& run, std::size_t i, std::size_t j) {
  TransportResult r;
  r.unitary = run.between(i, j);
  r.transported = r.unitary.adjoint() * run.spectra.at(i).ground_projection * r.unitary;
  r.error = operator_norm(Matrix(r.transported - run.spectra.at(j).ground_projection));
  return r;
}

bool TransportConvergence::converging() const {
  return base_error <= floor || refined_error <= floor || refined_error <= 0.5 * base_error;
}

TransportConvergence transport_convergence(const InteractionFamily& family, int steps, const FlowOptions& opts) {
  TransportConvergence out;
  out.steps = steps;
  const FlowRun base = run_flow(family, uniform_grid(family.s0(), family.s1(), steps), opts);
  out.panels = base.panels;
  out.base_error = base.max_transport_error();
  FlowOptions refined = opts;
  refined.generator.quadrature.panels = 2 * base.panels;
  const FlowRun fine = run_flow(family, uniform_grid(family.s0(), family.s1(), 2 * steps), refined);
  out.refined_error = fine.max_transport_error();
  return out;
}

}  // namespace specflow
