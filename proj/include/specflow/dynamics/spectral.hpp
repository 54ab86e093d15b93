#pragma once

#include "specflow/core/dense.hpp"
#include "specflow/core/majorana.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

/// Eigenvalues closer than this to the minimum belong to the ground cluster.
inline constexpr double kGroundClusterTol = 1e-9;

struct SpectralData {
  RealVector energies;       // ascending
  Matrix vectors;            // columns are eigenvectors
  Matrix ground_projection;  // onto the ground cluster
  int ground_degeneracy = 0;
  /// First eigenvalue above the ground cluster minus E_0; +inf if there is none.
  double gap = 0.0;

  /// V^† A V.
  Matrix to_eigenbasis(const Matrix& a) const { return vectors.adjoint() * a * vectors; }
  /// V A V^†.
  Matrix from_eigenbasis(const Matrix& a) const { return vectors * a * vectors.adjoint(); }
};

/// Throws InvalidArgument for a non-Hermitian input.
SpectralData diagonalize(const Matrix& h);
SpectralData diagonalize(const DenseOperator& h);
SpectralData diagonalize(const Interaction& h);

/// 𝓛_Φ A = Σ_M [Φ(M), A].
MajoranaPolynomial liouvillian_apply(const Interaction& phi, const MajoranaPolynomial& a);
DenseOperator liouvillian_apply(const Interaction& phi, const DenseOperator& a);

/// e^{iHt} A e^{−iHt} through the eigenbasis. t = 0 returns A unchanged.
Matrix heisenberg_evolve(const SpectralData& h, const Matrix& a, double t);

/// exp(i t X) for Hermitian X.
Matrix expi_hermitian(const Matrix& x, double t);

}  // namespace specflow
