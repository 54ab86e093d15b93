#include "specflow/flow/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "specflow/core/dense.hpp"
#include "specflow/core/format.hpp"

namespace specflow {
namespace {

Matrix projection_at(const InteractionFamily& family, double s) { return diagonalize(family.at(s)).ground_projection; }

Matrix total_matrix(const Interaction& phi) { return to_dense(phi.total()).matrix(); }

void require_nondegenerate(const SpectralData& spec, const char* what) {
  if (spec.ground_degeneracy != 1)
    throw HypothesisError(std::string(what) + " needs a nondegenerate ground state (degeneracy " +
                          std::to_string(spec.ground_degeneracy) + ")");
}

}  // namespace

std::vector<Matrix> random_operators(Eigen::Index dim, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Matrix> out;
  for (int i = 0; i < count; ++i) {
    Matrix a(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
      for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = Complex{normal(rng), normal(rng)};
    out.push_back(a / operator_norm(a));
  }
  return out;
}

Matrix projection_derivative(const InteractionFamily& family, double s, double h) {
  if (s - h >= family.s0() && s + h <= family.s1())
    return (projection_at(family, s + h) - projection_at(family, s - h)) / (2.0 * h);
  // One-sided second-order stencil at the ends of the interval.
  const double dir = s - h < family.s0() ? 1.0 : -1.0;
  const Matrix p0 = projection_at(family, s);
  const Matrix p1 = projection_at(family, s + dir * h);
  const Matrix p2 = projection_at(family, s + 2.0 * dir * h);
  return dir * (-3.0 * p0 + 4.0 * p1 - p2) / (2.0 * h);
}

ParallelTransportResult parallel_transport_check(const FlowRun& run, std::size_t index,
                                                 const std::vector<Matrix>& samples) {
  const double s = run.grid.at(index);
  const SpectralData& spec = run.spectra.at(index);
  require_nondegenerate(spec, "parallel transport check");
  const FilterFunction f = FilterFunction::build(run.filter);
  const Matrix h = total_matrix(run.family.at(s));
  const Matrix pdot = projection_derivative(run.family, s);
  QuadratureOptions quad;
  quad.panels = run.panels;
  ParallelTransportResult r;
  for (const auto& a : samples) {
    const auto od = od_decompose(f, h, spec, a, quad);
    r.max_diagonal = std::max(r.max_diagonal, std::abs((pdot * od.diagonal).trace()));
    r.max_plain = std::max(r.max_plain, std::abs((pdot * a).trace()));
  }
  r.bound = 1e-4 * r.max_plain + 1e-6;
  return r;
}

double derivative_switch_check(const FlowRun& run, std::size_t index, const std::vector<Matrix>& samples) {
  const double s = run.grid.at(index);
  const SpectralData& spec = run.spectra.at(index);
  require_nondegenerate(spec, "derivative switch check");
  const Matrix h = total_matrix(run.family.at(s));
  const Matrix hdot = total_matrix(run.family.derivative(s));
  const Matrix pdot = projection_derivative(run.family, s);
  const Matrix& p = spec.ground_projection;
  double worst = 0.0;
  for (const auto& a : samples)
    worst = std::max(worst, std::abs((pdot * commutator(h, a)).trace() + (p * commutator(hdot, a)).trace()));
  return worst;
}

GoldstoneResult goldstone_check(const Interaction& h, const Interaction& symmetry, const std::vector<double>& phis,
                                const std::vector<Matrix>& samples, double hypothesis_tol) {
  require_same_lattice(h.lattice(), symmetry.lattice());
  const Matrix hm = total_matrix(h);
  const Matrix sym = total_matrix(symmetry);
  GoldstoneResult r;
  r.hypothesis = operator_norm(commutator(hm, sym));
  if (r.hypothesis > hypothesis_tol)
    throw HypothesisError("symmetry hypothesis fails: ‖[H, Φ]‖ = " + fmt17(r.hypothesis) + " > " +
                          fmt17(hypothesis_tol));
  const SpectralData spec = diagonalize(hm);
  require_nondegenerate(spec, "Goldstone check");
  const Matrix& p = spec.ground_projection;
  for (double phi : phis) {
    const Matrix u = expi_hermitian(sym, phi);
    for (const auto& a : samples) {
      const Complex moved = (p * u * a * u.adjoint()).trace();
      r.invariance = std::max(r.invariance, std::abs(moved - (p * a).trace()));
    }
  }
  r.projection_commutator = operator_norm(commutator(p, sym));
  return r;
}

double gauge_covariance(const FlowRun& run) {
  const Matrix n = number_operator_matrix(run.family.at(run.grid.front()).lattice());
  const Matrix& p0 = run.spectra.front().ground_projection;
  double worst = 0.0;
  for (const auto& u : run.unitaries)
    worst = std::max(worst, operator_norm(commutator(Matrix(u.adjoint() * p0 * u), n)));
  return worst;
}

double derivation_residual(const FilterFunction& f, const Interaction& h, const Interaction& phi,
                           const InteractionInverse& inverse, const Matrix& a) {
  if (static_cast<int>(inverse.generators.size()) != h.lattice().num_sites())
    throw InvalidArgument("derivation equality needs the generators of every site");
  const SpectralData spec = diagonalize(h);
  const Matrix phi_total = total_matrix(phi);
  const Eigen::Index n = spec.energies.size();
  const double width = spec.energies(n - 1) - spec.energies(0);
  const auto rhs = quad_against(
      f, [&](double t) { return heisenberg_evolve(spec, commutator(phi_total, heisenberg_evolve(spec, a, -t)), t); },
      FilterMode::W, width);
  return operator_norm(Matrix(commutator(inverse.bulk_sum(), a) - rhs.value));
}

}  // namespace specflow
