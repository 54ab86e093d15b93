#pragma once

#include <span>
#include <vector>

#include "specflow/core/types.hpp"

namespace specflow::kernels {

/// Jordan-Wigner image of a Majorana monomial as a phased Pauli string:
/// Γ_S |b⟩ = phase · (−1)^{popcount(zmask & b)} |b ⊕ flip⟩.
struct JwImage {
  Mask flip = 0;
  Mask zmask = 0;
  Complex phase{1.0, 0.0};
};

JwImage jw_image(Mask monomial);

/// Coefficients c_S = ω^tr(Γ_S^† M) for every mask S < 4^n, where n is the
/// number of fermions (M is 2^n × 2^n). Walsh-Hadamard based, O(n 4^n).
std::vector<Complex> majorana_coefficients(const Matrix& m, int num_fermions);

/// Inverse of majorana_coefficients: Σ_S c_S Γ_S as a dense matrix.
Matrix majorana_synthesis(std::span<const Complex> coefficients, int num_fermions);

/// Σ_S c_S Γ_S for a sparse list of terms, O(terms · 2^n).
Matrix sparse_synthesis(std::span<const std::pair<Mask, Complex>> terms, int num_fermions);

namespace reference {

/// Dense matrix of Γ_S built by applying the Majorana operators one at a
/// time to each occupation basis state.
Matrix monomial_matrix(Mask monomial, int num_fermions);

/// Direct normalized-trace extraction, O(8^n).
std::vector<Complex> majorana_coefficients(const Matrix& m, int num_fermions);

/// Direct accumulation of Σ_S c_S Γ_S from per-monomial matrices.
Matrix majorana_synthesis(std::span<const Complex> coefficients, int num_fermions);

}  // namespace reference
}  // namespace specflow::kernels
