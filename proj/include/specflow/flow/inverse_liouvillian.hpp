#pragma once

#include <optional>
#include <vector>

#include "specflow/core/majorana.hpp"
#include "specflow/dynamics/spectral.hpp"
#include "specflow/filter/filter.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

/// Quadrature settings shared by every filtered time average.
struct QuadratureOptions {
  std::optional<int> panels;  // fixed panel count; adaptive when empty
  double tol = 1e-8;
  int max_panels = 1 << 10;  // cap for the adaptive search only
};

/// Eigenbasis multipliers of the filtered time averages for one Hamiltonian:
/// ∫ f(t) e^{itH} A e^{−itH} dt has entries K_ij A_ij in H's eigenbasis, with
/// K_ij = Σ_q f_q e^{i(E_i − E_j)t_q}.
///
/// `coarse` is the same kernel on half the panels; the difference between the
/// two is the reported quadrature residual.
struct FilterKernel {
  FilterMode mode = FilterMode::W;
  int panels = 0;
  Matrix fine;
  Matrix coarse;

  /// max |K_fine − K_coarse|.
  double residual() const;
  /// V (K ∘ V^† A V) V^†.
  Matrix apply(const SpectralData& h, const Matrix& a) const;
  Matrix apply_coarse(const SpectralData& h, const Matrix& a) const;
};

/// Doubles the panels from the filter's initial count until the kernel
/// changes by less than `opts.tol`, or uses the fixed count.
FilterKernel filter_kernel(const FilterFunction& f, const SpectralData& h, FilterMode mode,
                           const QuadratureOptions& opts = {});

struct InverseLiouvillian {
  Matrix value;
  int panels = 0;
  double quad_residual = 0.0;  // max-norm change against half the panels
};

/// 𝓘(A) = ∫ W(t) e^{itH} A e^{−itH} dt.
InverseLiouvillian inverse_liouvillian_op(const FilterFunction& f, const SpectralData& h, const Matrix& a,
                                          const QuadratureOptions& opts = {});

/// Ground-block identities of a splitting, all spectral norms. P is the
/// ground projection and Q = 1 − P.
struct GroundBlockResiduals {
  double od_pp = 0.0;  // ‖P A^OD P‖
  double d_pq = 0.0;   // ‖P A^D Q‖
  double od_pq = 0.0;  // ‖P A^OD Q − P A Q‖

  double max() const;
};

struct ODecomposition {
  Matrix input;
  Matrix diagonal;      // A^D = ∫ w(t) e^{itH} A e^{−itH} dt
  Matrix off_diagonal;  // A^OD = −i[H, 𝓘(A)]
  FilterParams filter;
  int panels = 0;
  double quad_residual = 0.0;

  /// ‖A − A^D − A^OD‖.
  double split_residual() const;
  GroundBlockResiduals ground_block(const SpectralData& h) const;
};

/// Splits A against H. Throws HypothesisError unless every excited level lies
/// at least g above the ground energy, where g is the filter's gap.
ODecomposition od_decompose(const FilterFunction& f, const Matrix& h, const SpectralData& spec, const Matrix& a,
                            const QuadratureOptions& opts = {});
ODecomposition od_decompose(const FilterFunction& f, const Matrix& h, const Matrix& a,
                            const QuadratureOptions& opts = {});

/// 𝓘(Φ)_{x,*} and its shells (E_{B_k(x)} − E_{B_{k−1}(x)}) 𝓘(Φ)_{x,*}, k = 0..R(x),
/// where R(x) is the exhaustion radius of x.
struct LocalizedGenerator {
  int x = 0;
  MajoranaPolynomial bulk;
  std::vector<MajoranaPolynomial> shells;
  double reassembly_residual = 0.0;  // ‖Σ_k shells − bulk‖
};

struct InteractionInverse {
  std::vector<LocalizedGenerator> generators;
  int panels = 0;
  double quad_residual = 0.0;

  /// Σ_x 𝓘(Φ)_{x,*} as a matrix.
  Matrix bulk_sum() const;
  /// The interaction B_k(x) ↦ shell k of x, summed over x.
  Interaction as_interaction() const;
};

/// 𝓘(Φ)_{x,*} = −i ∫ W(t) ∫_0^t e^{iu𝓛_H} 𝓛_Φ H_x du dt, with H_x the terms of H
/// centered at x. The double integral is taken as the single integral
/// −i ∫ V(u) e^{iu𝓛_H} 𝓛_Φ H_x du. `sites` defaults to every site.
InteractionInverse inverse_liouvillian_interaction(const FilterFunction& f, const Interaction& h,
                                                   const Interaction& phi,
                                                   std::optional<std::vector<int>> sites = {},
                                                   const QuadratureOptions& opts = {});

}  // namespace specflow
