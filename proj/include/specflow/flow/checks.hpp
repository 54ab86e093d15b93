#pragma once

#include <cstdint>
#include <vector>

#include "specflow/flow/spectral_flow.hpp"

namespace specflow {

/// Seeded dense operators with unit spectral norm (complex Gaussian entries).
std::vector<Matrix> random_operators(Eigen::Index dim, int count, std::uint64_t seed);

/// Ṗ_s by central differences of ground projections. Projections carry no
/// eigenvector phase, so no alignment is needed.
Matrix projection_derivative(const InteractionFamily& family, double s, double h = 1e-4);

struct ParallelTransportResult {
  double max_diagonal = 0.0;  // max |tr(Ṗ A^D)|
  double max_plain = 0.0;     // max |tr(Ṗ A)|
  double bound = 0.0;         // 1e-4·max_plain + 1e-6

  bool pass() const { return max_diagonal <= bound; }
};

/// Throws HypothesisError on a degenerate ground state or a gap below the filter's.
ParallelTransportResult parallel_transport_check(const FlowRun& run, std::size_t index,
                                                 const std::vector<Matrix>& samples);

/// max |tr(Ṗ_s [H_s, A]) + tr(P_s [Ḣ_s, A])| over the samples.
double derivative_switch_check(const FlowRun& run, std::size_t index, const std::vector<Matrix>& samples);

struct GoldstoneResult {
  double hypothesis = 0.0;              // ‖[H, Φ_sym]‖
  double invariance = 0.0;              // max |tr(P β_φ(A)) − tr(P A)|
  double projection_commutator = 0.0;  // ‖[P, Φ_sym]‖
};

/// β_φ(A) = e^{iφΦ} A e^{−iφΦ} with Φ the total of `symmetry`. Throws
/// HypothesisError if ‖[H, Φ]‖ > `hypothesis_tol` or the ground state is
/// degenerate.
GoldstoneResult goldstone_check(const Interaction& h, const Interaction& symmetry, const std::vector<double>& phis,
                                const std::vector<Matrix>& samples, double hypothesis_tol = 1e-10);

/// max_j ‖[U_j^† P_{s_0} U_j, N]‖ over the run's grid.
double gauge_covariance(const FlowRun& run);

/// ‖Σ_x [𝓘(Φ)_{x,*}, A] − ∫ W(t) e^{it𝓛_H} 𝓛_Φ e^{−it𝓛_H} A dt‖, the right side
/// by time-domain quadrature against exact evolution.
double derivation_residual(const FilterFunction& f, const Interaction& h, const Interaction& phi,
                           const InteractionInverse& inverse, const Matrix& a);

}  // namespace specflow
