#pragma once

#include <nlohmann/json_fwd.hpp>

#include "specflow/core/lattice.hpp"
#include "specflow/core/majorana.hpp"
#include "specflow/core/types.hpp"

namespace specflow {

/// An operator on the lattice Fock space as a 2^F × 2^F matrix in the
/// Jordan-Wigner occupation basis (bit k of a basis index = occupation of fermion k).
class DenseOperator {
 public:
  DenseOperator(Lattice lattice, Matrix matrix);

  static DenseOperator identity(const Lattice& lattice);
  static DenseOperator zero(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  const Matrix& matrix() const { return matrix_; }
  Eigen::Index dim() const { return matrix_.rows(); }

  bool is_hermitian(double tol = 1e-12) const;
  DenseOperator adjoint() const { return {lattice_, matrix_.adjoint()}; }

  DenseOperator& operator+=(const DenseOperator& o);
  DenseOperator& operator-=(const DenseOperator& o);
  friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
  friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
  friend DenseOperator operator*(Complex c, const DenseOperator& a) {
    return {a.lattice_, c * a.matrix_};
  }
  friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b);

 private:
  Lattice lattice_;
  Matrix matrix_;
};

DenseOperator to_dense(const MajoranaPolynomial& a);
MajoranaPolynomial from_dense(const DenseOperator& m);

/// Largest absolute entry.
double max_norm(const Matrix& m);
/// Spectral norm. Hermitian inputs are detected and use eigenvalues only.
double operator_norm(const Matrix& m);
double operator_norm(const DenseOperator& m);
/// Spectral norm of a polynomial, computed on the smallest Fock space that
/// carries its modes rather than on the full lattice.
double operator_norm(const MajoranaPolynomial& a);

Matrix commutator(const Matrix& a, const Matrix& b);
DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);

/// tr(M) / dim.
Complex tracial_state(const DenseOperator& m);

/// e^{iφN} M e^{−iφN}.
DenseOperator gauge_transform(const DenseOperator& m, double phi);

/// E_M on a matrix, through the Majorana coefficients.
DenseOperator conditional_expectation(const DenseOperator& m, SiteSet sites);

/// Total number operator N as a diagonal matrix.
Matrix number_operator_matrix(const Lattice& lattice);

void to_json(nlohmann::json& j, const Lattice& lattice);
Lattice lattice_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const MajoranaPolynomial& a);
MajoranaPolynomial polynomial_from_json(const nlohmann::json& j);

}  // namespace specflow
