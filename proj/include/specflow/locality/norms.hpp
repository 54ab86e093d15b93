#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "specflow/core/majorana.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

/// ‖A‖_{ν,x} = ‖A‖ + max_k (1+k)^ν ‖A − E_{B_k(x)} A‖, with k running up to
/// the exhaustion radius of x.
double quasi_local_norm(const MajoranaPolynomial& a, double nu, int x);

/// ‖A‖ and the tails ‖A − E_{B_k(x)} A‖ for k below the exhaustion radius,
/// from which ‖A‖_{ν,x} follows for any ν without further norms.
struct QuasiLocalProfile {
  double norm = 0.0;
  std::vector<double> tails;

  double at(double nu) const;
};

QuasiLocalProfile quasi_local_profile(const MajoranaPolynomial& a, int x);

/// Both sides of ‖[A,B]‖_{ν,x} ≤ 4^{ν+m+3} ‖A‖_{ν+m,y} ‖B‖_{ν+m,x} / (1+‖x−y‖)^m
/// for A even and anchored at y, B anchored at x.
struct CommutatorBound {
  double lhs = 0.0;
  double rhs = 0.0;

  bool holds() const { return lhs <= rhs; }
};

/// Throws InvalidArgument if A is not even.
CommutatorBound commutator_bound(const MajoranaPolynomial& a, int y, const MajoranaPolynomial& b, int x, int nu,
                                 int m);

/// ‖Φ‖_ν = max_x Σ_{M ∋ x} (1 + diam M)^ν ‖Φ(M)‖.
double interaction_norm(const Interaction& phi, double nu);

/// The site of M closest (Euclidean) to its center of mass. Ties go to the
/// larger site in one dimension and to the smallest polar angle of the offset
/// from the center of mass in two.
int center(const Lattice& lattice, SiteSet m);

/// Φ_x = Σ_{M : center(M) = x} Φ(M), for every site (zero where no term is centered).
std::map<int, MajoranaPolynomial> group_by_center(const Interaction& phi);

/// The restriction of Φ(M) used at scale k around z: E_{B_{⌊k/2⌋}(x)} Φ(M) when
/// x = center(M) lies in B_{⌊k/2⌋}(z), nothing otherwise.
std::optional<MajoranaPolynomial> restricted_term(const Interaction& phi, SiteSet m, int z, int k);

/// Φ restricted at scale k around z. Each kept term is filed under its cut
/// support M ∩ B_{⌊k/2⌋}(center(M)).
Interaction restrict_interaction(const Interaction& phi, int z, int k);

/// Seeded test operator A = Σ_k c_k (1+k)^{−ν*} A_k with ‖A_k‖ = 1, A_k supported
/// in B_k(x) and touching the shell B_k(x) \ B_{k−1}(x). The |c_k| ≤ 1 are scaled
/// so that Σ_k |c_k|(1+k)^{−ν*} ≤ 1, which gives ‖A‖ ≤ 1.
MajoranaPolynomial random_quasilocal(const Lattice& lattice, std::uint64_t seed, int x,
                                     double decay, bool even);

}  // namespace specflow
