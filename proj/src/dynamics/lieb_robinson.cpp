#include "specflow/dynamics/lieb_robinson.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "specflow/core/format.hpp"
#include "specflow/dynamics/cocycle.hpp"
#include "specflow/locality/norms.hpp"

namespace specflow {
namespace {

double light_cone(double distance, double t, double c, double nu) {
  return std::pow(1.0 + std::max(0.0, std::sqrt(distance) - c * t), nu);
}

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

}  // namespace

std::string LrProfile::to_csv() const {
  std::ostringstream out;
  out << "t,distance,commutator_norm,envelope_bound,fit_c,fit_nu\r\n";
  for (const auto& r : rows)
    out << fmt17(r.t) << ',' << r.distance << ',' << fmt17(r.commutator_norm) << ','
        << fmt17(r.envelope_bound) << ',' << fmt17(fit.c) << ',' << fmt17(fit.nu) << "\r\n";
  return out.str();
}

LrProfile lr_commutator_profile(const Interaction& h, const MajoranaPolynomial& a,
                                const std::vector<LrProbe>& probes,
                                const std::vector<double>& times,
                                const std::vector<double>& c_grid,
                                const std::vector<double>& nu_grid) {
  require_same_lattice(h.lattice(), a.lattice());
  for (const auto& p : probes)
    if (!a.is_even() && !p.op.is_even())
      throw InvalidArgument("commutator profile needs A or B even; both are odd here");
  const SpectralData spec = diagonalize(h);
  const Matrix a_dense = to_dense(a).matrix();
  std::vector<Matrix> b_dense;
  std::vector<double> b_weight;
  for (const auto& p : probes) {
    b_dense.push_back(to_dense(p.op).matrix());
    b_weight.push_back(operator_norm(p.op) * p.op.support_sites().size());
  }
  const double a_norm = operator_norm(a);

  const std::size_t nt = times.size();
  const std::size_t np = probes.size();
  std::vector<LrRow> rows(nt * np);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ti = 0; ti < static_cast<std::int64_t>(nt); ++ti) {
    const double t = times[static_cast<std::size_t>(ti)];
    const Matrix at = t == 0.0 ? Matrix() : heisenberg_evolve(spec, a_dense, t);
    for (std::size_t pi = 0; pi < np; ++pi) {
      double value;
      if (t == 0.0) {
        value = operator_norm(commutator(a, probes[pi].op));
      } else {
        value = operator_norm(commutator(at, b_dense[pi]));
      }
      rows[static_cast<std::size_t>(ti) * np + pi] = {t, probes[pi].distance, value, 0.0};
    }
  }

  // For each (c, ν) the required prefactor curve is g_i = value_i·cone_i/(‖A‖‖B‖|Y|).
  // Fit g ≈ C(1+t)^p in logs, then lift C until no row lies above the envelope.
  LrProfile out;
  double best_score = std::numeric_limits<double>::infinity();
  for (double c : c_grid) {
    for (double nu : nu_grid) {
      std::vector<double> g(rows.size()), lx, ly;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const double w = a_norm * b_weight[i % np];
        g[i] = w > 0.0 ? rows[i].commutator_norm * light_cone(rows[i].distance, rows[i].t, c, nu) / w : 0.0;
        if (g[i] > 0.0) {
          lx.push_back(std::log1p(rows[i].t));
          ly.push_back(std::log(g[i]));
        }
      }
      const double p = std::max(0.0, slope(lx, ly));
      double pref = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i) pref = std::max(pref, g[i] / std::pow(1.0 + rows[i].t, p));
      // Guard against the last-bit rounding of re-evaluating the envelope.
      pref *= 1.0 + 8.0 * std::numeric_limits<double>::epsilon();
      double score = 0.0;
      for (std::size_t i = 0; i < rows.size(); ++i)
        if (g[i] > 0.0) score += std::log(pref * std::pow(1.0 + rows[i].t, p) / g[i]);
      if (score < best_score) {
        best_score = score;
        out.fit = {c, nu, pref, p};
      }
    }
  }
  out.min_residual = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double w = a_norm * b_weight[i % np];
    rows[i].envelope_bound = out.fit.prefactor * w * std::pow(1.0 + rows[i].t, out.fit.power) /
                             light_cone(rows[i].distance, rows[i].t, out.fit.c, out.fit.nu);
    out.min_residual = std::min(out.min_residual, rows[i].envelope_bound - rows[i].commutator_norm);
  }
  out.rows = std::move(rows);
  return out;
}

bool lr_envelope_inequality(double x, double n, double t, double nu) {
  if (x < 0 || n < 1 || t <= 0 || nu < 0) throw InvalidArgument("need x ≥ 0, n ≥ 1, t > 0, ν ≥ 0");
  const double lhs = nu * std::log1p(x) - 2.0 * nu * std::log1p(std::max(0.0, std::sqrt(x / n) - t));
  const double rhs = nu * std::log(n) + nu * std::log1p(t * t);
  return lhs <= rhs;
}

std::vector<double> restriction_convergence(const InteractionFamily& family,
                                            const MajoranaPolynomial& a, int z, double u,
                                            double v) {
  const Lattice& lat = a.lattice();
  int reach = lat.exhaustion_radius(z);
  const Interaction start = family.at(u);
  for (const auto& [m, op] : start.terms()) reach = std::max(reach, lat.diameter(m));
  const int k_full = 2 * reach;
  const Matrix a_dense = to_dense(a).matrix();

  auto evolve = [&](const InteractionFamily& fam) -> Matrix {
    if (fam.constant()) return heisenberg_evolve(diagonalize(fam.at(u)), a_dense, v - u);
    const Matrix w = cocycle_propagate_adaptive(dense_generator(fam), u, v).unitary;
    return w * a_dense * w.adjoint();
  };
  auto restricted = [&](int k) {
    return InteractionFamily(
        family.s0(), family.s1(),
        [family, z, k](double s) { return restrict_interaction(family.at(s), z, k); }, {},
        family.constant());
  };

  const Matrix exact = evolve(family);
  std::vector<double> errors;
  for (int k = 0; k <= k_full; ++k) errors.push_back(operator_norm(Matrix(exact - evolve(restricted(k)))));
  return errors;
}

NormGrowth norm_growth(const Interaction& h, const MajoranaPolynomial& a, double nu, int x,
                       const std::vector<double>& times) {
  const SpectralData spec = diagonalize(h);
  const Matrix a_dense = to_dense(a).matrix();
  const double base = quasi_local_norm(a, nu, x);
  NormGrowth out;
  out.times = times;
  out.ratios.resize(times.size());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const DenseOperator at(a.lattice(), heisenberg_evolve(spec, a_dense, times[i]));
    out.ratios[i] = quasi_local_norm(from_dense(at), nu, x) / base;
    if (!std::isfinite(out.ratios[i])) throw ConvergenceError("quasi-local norm ratio is not finite");
    lx.push_back(std::log1p(times[i]));
    ly.push_back(std::log(out.ratios[i]));
  }
  out.fitted_degree = slope(lx, ly);
  return out;
}

double sum_representation_ratio(const Interaction& phi, const MajoranaPolynomial& a, double nu,
                                int x) {
  const int d = phi.lattice().dimension();
  const double num = quasi_local_norm(liouvillian_apply(phi, a), nu, x);
  const double den = interaction_norm(phi, d + 1 + 2 * nu) * quasi_local_norm(a, d + 3 + 2 * nu, x);
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace specflow
