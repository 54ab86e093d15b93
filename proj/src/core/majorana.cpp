#include "specflow/core/majorana.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <vector>

namespace specflow {

MonomialProduct monomial_product(Mask s, Mask t) {
  // Move each factor of T leftwards past the larger factors of S; equal
  // factors then meet and square to one.
  int swaps = 0;
  for (Mask rest = t; rest != 0; rest &= rest - 1) {
    const int q = std::countr_zero(rest);
    const Mask above = q >= 31 ? Mask{0} : ~((Mask{2} << q) - 1);
    swaps += std::popcount(s & above);
  }
  return {(swaps & 1) ? -1 : 1, s ^ t};
}

int reversal_sign(Mask s) {
  const int r = std::popcount(s);
  return ((r * (r - 1) / 2) & 1) ? -1 : 1;
}

MajoranaPolynomial MajoranaPolynomial::identity(const Lattice& lattice, Complex c) {
  return monomial(lattice, 0, c);
}

MajoranaPolynomial MajoranaPolynomial::monomial(const Lattice& lattice, Mask mask, Complex c) {
  MajoranaPolynomial p(lattice);
  p.add(mask, c);
  return p;
}

MajoranaPolynomial MajoranaPolynomial::majorana(const Lattice& lattice, int mode) {
  if (mode < 0 || mode >= lattice.num_modes())
    throw InvalidArgument("Majorana mode " + std::to_string(mode) + " outside lattice");
  return monomial(lattice, Mask{1} << mode);
}

MajoranaPolynomial MajoranaPolynomial::creation(const Lattice& lattice, int fermion) {
  // a^† = (m_{2k} + i m_{2k+1}) / 2
  MajoranaPolynomial p = 0.5 * majorana(lattice, 2 * fermion);
  p += (0.5 * kI) * majorana(lattice, 2 * fermion + 1);
  return p;
}

MajoranaPolynomial MajoranaPolynomial::annihilation(const Lattice& lattice, int fermion) {
  MajoranaPolynomial p = 0.5 * majorana(lattice, 2 * fermion);
  p += (-0.5 * kI) * majorana(lattice, 2 * fermion + 1);
  return p;
}

MajoranaPolynomial MajoranaPolynomial::number(const Lattice& lattice, int fermion) {
  // n = (1 − i m_{2k} m_{2k+1}) / 2
  if (fermion < 0 || fermion >= lattice.num_fermions())
    throw InvalidArgument("fermion index outside lattice");
  MajoranaPolynomial p = identity(lattice, 0.5);
  p.add(Mask{3} << (2 * fermion), -0.5 * kI);
  return p;
}

MajoranaPolynomial MajoranaPolynomial::total_number(const Lattice& lattice) {
  MajoranaPolynomial p(lattice);
  for (int k = 0; k < lattice.num_fermions(); ++k) p += number(lattice, k);
  return p;
}

Complex MajoranaPolynomial::coefficient(Mask mask) const {
  const auto it = terms_.find(mask);
  return it == terms_.end() ? Complex{} : it->second;
}

void MajoranaPolynomial::check_mask(Mask mask) const {
  if ((mask & ~lattice_.all_modes()) != 0) throw InvalidArgument("monomial mask outside lattice");
}

void MajoranaPolynomial::add(Mask mask, Complex c) {
  check_mask(mask);
  auto [it, inserted] = terms_.try_emplace(mask, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
}

Mask MajoranaPolynomial::support_modes() const {
  Mask m = 0;
  for (const auto& [mask, c] : terms_) m |= mask;
  return m;
}

SiteSet MajoranaPolynomial::support_sites() const {
  const Mask modes = support_modes();
  std::uint32_t sites = 0;
  const int per_site = 2 * lattice_.orbitals();
  for (Mask b = modes; b != 0; b &= b - 1) sites |= std::uint32_t{1} << (std::countr_zero(b) / per_site);
  return SiteSet(sites);
}

MajoranaPolynomial MajoranaPolynomial::adjoint() const {
  MajoranaPolynomial out(lattice_);
  for (const auto& [mask, c] : terms_) out.terms_.emplace(mask, std::conj(c) * double(reversal_sign(mask)));
  return out;
}

bool MajoranaPolynomial::is_self_adjoint(double tol) const {
  return max_coefficient_distance(adjoint()) <= tol;
}

bool MajoranaPolynomial::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& kv) { return std::popcount(kv.first) % 2 == 0; });
}

double MajoranaPolynomial::max_coefficient_distance(const MajoranaPolynomial& other) const {
  require_same_lattice(lattice_, other.lattice_);
  double d = 0.0;
  for (const auto& [mask, c] : terms_) d = std::max(d, std::abs(c - other.coefficient(mask)));
  for (const auto& [mask, c] : other.terms_)
    if (!terms_.contains(mask)) d = std::max(d, std::abs(c));
  return d;
}

MajoranaPolynomial& MajoranaPolynomial::operator+=(const MajoranaPolynomial& other) {
  require_same_lattice(lattice_, other.lattice_);
  for (const auto& [mask, c] : other.terms_) add(mask, c);
  return *this;
}

MajoranaPolynomial& MajoranaPolynomial::operator-=(const MajoranaPolynomial& other) {
  require_same_lattice(lattice_, other.lattice_);
  for (const auto& [mask, c] : other.terms_) add(mask, -c);
  return *this;
}

MajoranaPolynomial& MajoranaPolynomial::operator*=(Complex c) {
  if (c == Complex{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (std::abs(it->second) < kPruneThreshold)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

MajoranaPolynomial poly_mul(const MajoranaPolynomial& a, const MajoranaPolynomial& b) {
  require_same_lattice(a.lattice(), b.lattice());
  MajoranaPolynomial::Terms acc;
  for (const auto& [s, cs] : a.terms()) {
    for (const auto& [t, ct] : b.terms()) {
      const auto [sign, mask] = monomial_product(s, t);
      acc[mask] += double(sign) * cs * ct;
    }
  }
  MajoranaPolynomial out(a.lattice());
  for (const auto& [mask, c] : acc)
    if (std::abs(c) >= kPruneThreshold) out.add(mask, c);
  return out;
}

MajoranaPolynomial commutator(const MajoranaPolynomial& a, const MajoranaPolynomial& b) {
  require_same_lattice(a.lattice(), b.lattice());
  MajoranaPolynomial::Terms acc;
  for (const auto& [s, cs] : a.terms()) {
    for (const auto& [t, ct] : b.terms()) {
      const auto ab = monomial_product(s, t);
      const auto ba = monomial_product(t, s);
      const int sign = ab.sign - ba.sign;
      if (sign != 0) acc[ab.mask] += double(sign) * cs * ct;
    }
  }
  MajoranaPolynomial out(a.lattice());
  for (const auto& [mask, c] : acc)
    if (std::abs(c) >= kPruneThreshold) out.add(mask, c);
  return out;
}

Complex tracial_state(const MajoranaPolynomial& a) { return a.coefficient(0); }

MajoranaPolynomial conditional_expectation(const MajoranaPolynomial& a, SiteSet sites) {
  a.lattice().check_sites(sites);
  const Mask keep = a.lattice().modes(sites);
  MajoranaPolynomial out(a.lattice());
  for (const auto& [mask, c] : a.terms())
    if ((mask & ~keep) == 0) out.add(mask, c);
  return out;
}

MajoranaPolynomial gauge_transform(const MajoranaPolynomial& a, double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  MajoranaPolynomial::Terms acc;
  for (const auto& [mask, coeff] : a.terms()) {
    std::vector<std::pair<Mask, Complex>> images{{mask, coeff}};
    for (int k = 0; k < a.lattice().num_fermions(); ++k) {
      const Mask lo = Mask{1} << (2 * k);
      const Mask hi = Mask{1} << (2 * k + 1);
      const bool has_lo = mask & lo;
      const bool has_hi = mask & hi;
      if (has_lo == has_hi) continue;  // m_{2k} m_{2k+1} is invariant
      std::vector<std::pair<Mask, Complex>> next;
      next.reserve(2 * images.size());
      for (const auto& [m, v] : images) {
        const Mask swapped = m ^ lo ^ hi;
        if (has_lo) {
          // m_{2k} -> cos φ m_{2k} − sin φ m_{2k+1}
          next.emplace_back(m, v * c);
          next.emplace_back(swapped, -v * s);
        } else {
          // m_{2k+1} -> sin φ m_{2k} + cos φ m_{2k+1}
          next.emplace_back(swapped, v * s);
          next.emplace_back(m, v * c);
        }
      }
      images = std::move(next);
    }
    for (const auto& [m, v] : images) acc[m] += v;
  }
  MajoranaPolynomial out(a.lattice());
  for (const auto& [mask, v] : acc)
    if (std::abs(v) >= kPruneThreshold) out.add(mask, v);
  return out;
}

ParityParts parity_projections(const MajoranaPolynomial& a) {
  ParityParts parts{MajoranaPolynomial(a.lattice()), MajoranaPolynomial(a.lattice())};
  for (const auto& [mask, c] : a.terms()) {
    if (std::popcount(mask) % 2 == 0)
      parts.even.add(mask, c);
    else
      parts.odd.add(mask, c);
  }
  return parts;
}

}  // namespace specflow
