#include "specflow/flow/inverse_liouvillian.hpp"

#include <algorithm>
#include <string>

#include "specflow/core/dense.hpp"
#include "specflow/kernels/spectral_quadrature.hpp"
#include "specflow/locality/norms.hpp"

namespace specflow {
namespace {

Matrix kernel_at(const FilterFunction& f, const SpectralData& h, FilterMode mode, int panels) {
  const auto& r = f.rule(panels);
  switch (mode) {
    case FilterMode::w:
      return kernels::spectral_kernel(h.energies, r.nodes, r.w_weights, kernels::Parity::Even);
    case FilterMode::W:
      return kernels::spectral_kernel(h.energies, r.nodes, r.W_weights, kernels::Parity::Odd);
    case FilterMode::V:
      return kernels::spectral_kernel(h.energies, r.nodes, r.V_weights, kernels::Parity::Even);
  }
  throw InvalidArgument("unknown filter mode");
}

Matrix apply_kernel(const Matrix& k, const SpectralData& h, const Matrix& a) {
  return h.from_eigenbasis(k.cwiseProduct(h.to_eigenbasis(a)));
}

}  // namespace

double FilterKernel::residual() const { return max_norm(fine - coarse); }

Matrix FilterKernel::apply(const SpectralData& h, const Matrix& a) const { return apply_kernel(fine, h, a); }

Matrix FilterKernel::apply_coarse(const SpectralData& h, const Matrix& a) const {
  return apply_kernel(coarse, h, a);
}

FilterKernel filter_kernel(const FilterFunction& f, const SpectralData& h, FilterMode mode,
                           const QuadratureOptions& opts) {
  FilterKernel k;
  k.mode = mode;
  if (opts.panels) {
    const int p = *opts.panels;
    if (p < 4 || p % 4 != 0) throw InvalidArgument("fixed panel count must be a positive multiple of 4");
    k.panels = p;
    k.fine = kernel_at(f, h, mode, p);
    k.coarse = kernel_at(f, h, mode, p / 2);
    return k;
  }
  const Eigen::Index n = h.energies.size();
  const double width = h.energies(n - 1) - h.energies(0);
  int p = std::min(f.initial_panels(width), std::max(4, opts.max_panels / 2));
  k.coarse = kernel_at(f, h, mode, p);
  while (true) {
    if (2 * p > opts.max_panels)
      throw ConvergenceError("filter kernel did not settle below " + std::to_string(opts.max_panels) + " panels");
    p *= 2;
    k.fine = kernel_at(f, h, mode, p);
    k.panels = p;
    if (k.residual() < opts.tol) return k;
    k.coarse = std::move(k.fine);
  }
}

InverseLiouvillian inverse_liouvillian_op(const FilterFunction& f, const SpectralData& h, const Matrix& a,
                                          const QuadratureOptions& opts) {
  const auto k = filter_kernel(f, h, FilterMode::W, opts);
  InverseLiouvillian out;
  out.value = k.apply(h, a);
  out.panels = k.panels;
  out.quad_residual = max_norm(out.value - k.apply_coarse(h, a));
  return out;
}

double GroundBlockResiduals::max() const { return std::max({od_pp, d_pq, od_pq}); }

double ODecomposition::split_residual() const { return operator_norm(Matrix(input - diagonal - off_diagonal)); }

GroundBlockResiduals ODecomposition::ground_block(const SpectralData& h) const {
  const Matrix& p = h.ground_projection;
  const Matrix q = Matrix::Identity(p.rows(), p.cols()) - p;
  GroundBlockResiduals r;
  r.od_pp = operator_norm(Matrix(p * off_diagonal * p));
  r.d_pq = operator_norm(Matrix(p * diagonal * q));
  r.od_pq = operator_norm(Matrix(p * (off_diagonal - input) * q));
  return r;
}

ODecomposition od_decompose(const FilterFunction& f, const Matrix& h, const SpectralData& spec, const Matrix& a,
                            const QuadratureOptions& opts) {
  if (spec.gap < f.gap())
    throw HypothesisError("spectral gap " + std::to_string(spec.gap) + " is below the filter gap " +
                          std::to_string(f.gap()) + "; the ground-block identities are not guaranteed");
  const auto kw = filter_kernel(f, spec, FilterMode::W, opts);
  QuadratureOptions fixed = opts;
  fixed.panels = kw.panels;
  const auto kd = filter_kernel(f, spec, FilterMode::w, fixed);

  ODecomposition out;
  out.input = a;
  out.filter = f.params();
  out.panels = kw.panels;
  const Matrix inv = kw.apply(spec, a);
  const Matrix inv_coarse = kw.apply_coarse(spec, a);
  out.off_diagonal = Complex{0.0, -1.0} * commutator(h, inv);
  out.diagonal = kd.apply(spec, a);
  const Matrix od_coarse = Complex{0.0, -1.0} * commutator(h, inv_coarse);
  out.quad_residual = std::max(max_norm(out.off_diagonal - od_coarse),
                               max_norm(out.diagonal - kd.apply_coarse(spec, a)));
  return out;
}

ODecomposition od_decompose(const FilterFunction& f, const Matrix& h, const Matrix& a,
                            const QuadratureOptions& opts) {
  return od_decompose(f, h, diagonalize(h), a, opts);
}

Matrix InteractionInverse::bulk_sum() const {
  if (generators.empty()) throw InvalidArgument("no localized generators");
  Matrix sum = to_dense(generators.front().bulk).matrix();
  for (std::size_t i = 1; i < generators.size(); ++i) sum += to_dense(generators[i].bulk).matrix();
  return sum;
}

Interaction InteractionInverse::as_interaction() const {
  if (generators.empty()) throw InvalidArgument("no localized generators");
  const Lattice& lattice = generators.front().bulk.lattice();
  Interaction out(lattice);
  for (const auto& g : generators)
    for (std::size_t k = 0; k < g.shells.size(); ++k)
      if (!g.shells[k].is_zero()) out.add(lattice.ball(g.x, static_cast<int>(k)), g.shells[k]);
  return out;
}

InteractionInverse inverse_liouvillian_interaction(const FilterFunction& f, const Interaction& h,
                                                   const Interaction& phi, std::optional<std::vector<int>> sites,
                                                   const QuadratureOptions& opts) {
  require_same_lattice(h.lattice(), phi.lattice());
  const Lattice& lattice = h.lattice();
  if (!sites) {
    sites.emplace();
    for (int x = 0; x < lattice.num_sites(); ++x) sites->push_back(x);
  }
  const SpectralData spec = diagonalize(h);
  const auto kv = filter_kernel(f, spec, FilterMode::V, opts);
  const Matrix phi_total = to_dense(phi.total()).matrix();
  const auto groups = group_by_center(h);

  InteractionInverse out;
  out.panels = kv.panels;
  for (int x : *sites) {
    if (!lattice.contains(x)) throw InvalidArgument("site " + std::to_string(x) + " outside lattice");
    const Matrix hx = to_dense(groups.at(x)).matrix();
    const Matrix b = commutator(phi_total, hx);
    const Matrix bulk = Complex{0.0, -1.0} * kv.apply(spec, b);
    const Matrix bulk_coarse = Complex{0.0, -1.0} * kv.apply_coarse(spec, b);
    out.quad_residual = std::max(out.quad_residual, max_norm(bulk - bulk_coarse));

    LocalizedGenerator g{x, from_dense(DenseOperator(lattice, bulk)), {}, 0.0};
    const int radius = lattice.exhaustion_radius(x);
    MajoranaPolynomial previous(lattice);
    MajoranaPolynomial sum(lattice);
    for (int k = 0; k <= radius; ++k) {
      MajoranaPolynomial inner = conditional_expectation(g.bulk, lattice.ball(x, k));
      g.shells.push_back(inner - previous);
      sum = sum + g.shells.back();
      previous = std::move(inner);
    }
    g.reassembly_residual = operator_norm(sum - g.bulk);
    out.generators.push_back(std::move(g));
  }
  return out;
}

}  // namespace specflow
