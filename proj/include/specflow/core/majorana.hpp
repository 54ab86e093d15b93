#pragma once

#include <map>
#include <utility>

#include "specflow/core/lattice.hpp"
#include "specflow/core/types.hpp"

namespace specflow {

/// Coefficients below this magnitude are dropped from polynomials.
inline constexpr double kPruneThreshold = 1e-15;

/// Γ_S Γ_T = sign · Γ_{S Δ T}. With self-adjoint Majoranas the phase is always ±1.
struct MonomialProduct {
  int sign;
  Mask mask;
};

MonomialProduct monomial_product(Mask s, Mask t);

/// Γ_S^† = reversal_sign(S) · Γ_S.
int reversal_sign(Mask s);

/// A fermionic operator as a sparse expansion Σ_S c_S Γ_S over ascending
/// Majorana monomials, m_{2k} = a_k + a_k^†, m_{2k+1} = i(a_k − a_k^†).
class MajoranaPolynomial {
 public:
  using Terms = std::map<Mask, Complex>;

  explicit MajoranaPolynomial(Lattice lattice) : lattice_(std::move(lattice)) {}

  static MajoranaPolynomial identity(const Lattice& lattice, Complex c = 1.0);
  static MajoranaPolynomial monomial(const Lattice& lattice, Mask mask, Complex c = 1.0);
  static MajoranaPolynomial majorana(const Lattice& lattice, int mode);
  static MajoranaPolynomial creation(const Lattice& lattice, int fermion);
  static MajoranaPolynomial annihilation(const Lattice& lattice, int fermion);
  static MajoranaPolynomial number(const Lattice& lattice, int fermion);
  /// N = Σ_k n_k over every fermion of the lattice.
  static MajoranaPolynomial total_number(const Lattice& lattice);

  const Lattice& lattice() const { return lattice_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  Complex coefficient(Mask mask) const;

  /// Adds c·Γ_S, dropping the entry if the result falls below the prune threshold.
  void add(Mask mask, Complex c);

  /// Union of the Majorana modes appearing in any term.
  Mask support_modes() const;
  /// Sites whose modes appear in some term.
  SiteSet support_sites() const;

  MajoranaPolynomial adjoint() const;
  bool is_self_adjoint(double tol = 1e-12) const;
  bool is_even() const;

  /// Largest coefficient difference; 0 for identical polynomials.
  double max_coefficient_distance(const MajoranaPolynomial& other) const;

  MajoranaPolynomial& operator+=(const MajoranaPolynomial& other);
  MajoranaPolynomial& operator-=(const MajoranaPolynomial& other);
  MajoranaPolynomial& operator*=(Complex c);

  friend MajoranaPolynomial operator+(MajoranaPolynomial a, const MajoranaPolynomial& b) {
    return a += b;
  }
  friend MajoranaPolynomial operator-(MajoranaPolynomial a, const MajoranaPolynomial& b) {
    return a -= b;
  }
  friend MajoranaPolynomial operator*(Complex c, MajoranaPolynomial a) { return a *= c; }
  friend MajoranaPolynomial operator*(MajoranaPolynomial a, Complex c) { return a *= c; }

 private:
  void check_mask(Mask mask) const;

  Lattice lattice_;
  Terms terms_;
};

MajoranaPolynomial poly_mul(const MajoranaPolynomial& a, const MajoranaPolynomial& b);
inline MajoranaPolynomial operator*(const MajoranaPolynomial& a, const MajoranaPolynomial& b) {
  return poly_mul(a, b);
}
MajoranaPolynomial commutator(const MajoranaPolynomial& a, const MajoranaPolynomial& b);

/// ω^tr(A): the coefficient of the identity monomial.
Complex tracial_state(const MajoranaPolynomial& a);

/// E_M: keeps exactly the monomials whose modes lie in the sites M.
MajoranaPolynomial conditional_expectation(const MajoranaPolynomial& a, SiteSet sites);

/// g_φ, acting as a rotation by φ in each Majorana plane (m_{2k}, m_{2k+1}).
MajoranaPolynomial gauge_transform(const MajoranaPolynomial& a, double phi);

struct ParityParts {
  MajoranaPolynomial even;
  MajoranaPolynomial odd;
};
ParityParts parity_projections(const MajoranaPolynomial& a);

}  // namespace specflow
