#include "specflow/harness/models.hpp"

namespace specflow::models {
namespace {

using Poly = MajoranaPolynomial;

Poly create(const Lattice& l, int x) { return Poly::creation(l, l.fermion(x)); }
Poly annihilate(const Lattice& l, int x) { return Poly::annihilation(l, l.fermion(x)); }

Couplings at(const Couplings& a, const Couplings& b, double s) {
  return {a.mu + s * b.mu, a.stagger + s * b.stagger, a.hop + s * b.hop, a.pair + s * b.pair,
          a.density + s * b.density};
}

bool is_zero(const Couplings& c) {
  return c.mu == 0.0 && c.stagger == 0.0 && c.hop == 0.0 && c.pair == 0.0 && c.density == 0.0;
}

}  // namespace

Poly hopping(const Lattice& lattice, int x, int y) {
  return create(lattice, x) * annihilate(lattice, y) + create(lattice, y) * annihilate(lattice, x);
}

Poly pairing(const Lattice& lattice, int x, int y) {
  return annihilate(lattice, x) * annihilate(lattice, y) + create(lattice, y) * create(lattice, x);
}

Poly density_density(const Lattice& lattice, int x, int y) {
  return Poly::number(lattice, lattice.fermion(x)) * Poly::number(lattice, lattice.fermion(y));
}

std::vector<std::pair<int, int>> bonds(const Lattice& lattice) {
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < lattice.num_sites(); ++x) {
    const auto c = lattice.coords(x);
    if (c[0] + 1 < lattice.extent(0)) out.emplace_back(x, lattice.site_at({c[0] + 1, c[1]}));
    if (lattice.dimension() == 2 && c[1] + 1 < lattice.extent(1))
      out.emplace_back(x, lattice.site_at({c[0], c[1] + 1}));
  }
  return out;
}

Interaction build(const Lattice& lattice, const Couplings& c) {
  if (lattice.orbitals() != 1) throw InvalidArgument("model couplings need one orbital per site");
  Interaction phi(lattice);
  for (int x = 0; x < lattice.num_sites(); ++x) {
    const double mu = c.mu + (x % 2 == 0 ? c.stagger : -c.stagger);
    if (mu != 0.0) phi.add(SiteSet::single(x), Complex{mu} * Poly::number(lattice, lattice.fermion(x)));
  }
  for (const auto& [x, y] : bonds(lattice)) {
    const SiteSet m = SiteSet::single(x) | SiteSet::single(y);
    Poly term(lattice);
    if (c.hop != 0.0) term -= Complex{c.hop} * hopping(lattice, x, y);
    if (c.pair != 0.0) term += Complex{c.pair} * pairing(lattice, x, y);
    if (c.density != 0.0) term += Complex{c.density} * density_density(lattice, x, y);
    phi.add(m, term);
  }
  return phi;
}

Interaction number_interaction(const Lattice& lattice) {
  Interaction phi(lattice);
  for (int x = 0; x < lattice.num_sites(); ++x)
    for (int o = 0; o < lattice.orbitals(); ++o) phi.add(SiteSet::single(x), Poly::number(lattice, lattice.fermion(x, o)));
  return phi;
}

InteractionFamily linear_family(const Lattice& lattice, const Couplings& at0, const Couplings& slope, double s0,
                                double s1) {
  auto family = [lattice, at0, slope](double s) { return build(lattice, at(at0, slope, s)); };
  if (is_zero(slope)) return InteractionFamily(s0, s1, family, {}, true);
  auto derivative = [lattice, slope](double) { return build(lattice, slope); };
  return InteractionFamily(s0, s1, family, InteractionFamily::Builder(derivative));
}

}  // namespace specflow::models
