#include "specflow/locality/norms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "specflow/core/dense.hpp"

namespace specflow {

double QuasiLocalProfile::at(double nu) const {
  double tail = 0.0;
  for (std::size_t k = 0; k < tails.size(); ++k)
    tail = std::max(tail, std::pow(1.0 + static_cast<double>(k), nu) * tails[k]);
  return norm + tail;
}

QuasiLocalProfile quasi_local_profile(const MajoranaPolynomial& a, int x) {
  const Lattice& lat = a.lattice();
  lat.check_site(x);
  QuasiLocalProfile p;
  p.norm = operator_norm(a);
  const int k_max = lat.exhaustion_radius(x);
  for (int k = 0; k < k_max; ++k) p.tails.push_back(operator_norm(a - conditional_expectation(a, lat.ball(x, k))));
  return p;
}

double quasi_local_norm(const MajoranaPolynomial& a, double nu, int x) { return quasi_local_profile(a, x).at(nu); }

CommutatorBound commutator_bound(const MajoranaPolynomial& a, int y, const MajoranaPolynomial& b, int x, int nu,
                                 int m) {
  if (!a.is_even()) throw InvalidArgument("commutator bound needs an even A");
  const Lattice& lat = a.lattice();
  CommutatorBound r;
  r.lhs = quasi_local_norm(commutator(a, b), nu, x);
  r.rhs = std::pow(4.0, nu + m + 3) * quasi_local_norm(a, nu + m, y) * quasi_local_norm(b, nu + m, x) /
          std::pow(1.0 + lat.distance(x, y), m);
  return r;
}

double interaction_norm(const Interaction& phi, double nu) {
  const Lattice& lat = phi.lattice();
  std::vector<double> per_site(static_cast<std::size_t>(lat.num_sites()), 0.0);
  for (const auto& [m, op] : phi.terms()) {
    const double w = std::pow(1.0 + lat.diameter(m), nu) * operator_norm(op);
    for (int x : m.sites()) per_site[static_cast<std::size_t>(x)] += w;
  }
  return per_site.empty() ? 0.0 : *std::max_element(per_site.begin(), per_site.end());
}

namespace {

// Offsets are |M|·c − Σ c', i.e. scaled by |M|, so everything stays integral.
struct Offset {
  long x;
  long y;
};

int half_plane(Offset v) { return (v.y > 0 || (v.y == 0 && v.x > 0)) ? 0 : 1; }

// Strict ordering by polar angle in [0, 2π).
bool angle_less(Offset a, Offset b) {
  const int ha = half_plane(a);
  const int hb = half_plane(b);
  if (ha != hb) return ha < hb;
  return a.x * b.y - a.y * b.x > 0;
}

}  // namespace

int center(const Lattice& lattice, SiteSet m) {
  if (m.empty()) throw InvalidArgument("center of an empty site set");
  lattice.check_sites(m);
  const auto sites = m.sites();
  const long n = static_cast<long>(sites.size());
  long sx = 0;
  long sy = 0;
  for (int s : sites) {
    const auto c = lattice.coords(s);
    sx += c[0];
    sy += c[1];
  }
  int best = -1;
  Offset best_off{0, 0};
  long best_d2 = 0;
  for (int s : sites) {
    const auto c = lattice.coords(s);
    const Offset off{n * c[0] - sx, n * c[1] - sy};
    const long d2 = off.x * off.x + off.y * off.y;
    bool take = best < 0 || d2 < best_d2;
    if (!take && d2 == best_d2 && d2 != 0) {
      take = lattice.dimension() == 1 ? s > best : angle_less(off, best_off);
    }
    if (take) {
      best = s;
      best_off = off;
      best_d2 = d2;
    }
  }
  return best;
}

std::map<int, MajoranaPolynomial> group_by_center(const Interaction& phi) {
  std::map<int, MajoranaPolynomial> out;
  const Lattice& lat = phi.lattice();
  for (int x = 0; x < lat.num_sites(); ++x) out.emplace(x, MajoranaPolynomial(lat));
  for (const auto& [m, op] : phi.terms()) out.at(center(lat, m)) += op;
  return out;
}

std::optional<MajoranaPolynomial> restricted_term(const Interaction& phi, SiteSet m, int z, int k) {
  if (k < 0) throw InvalidArgument("restriction radius must be nonnegative");
  const Lattice& lat = phi.lattice();
  lat.check_site(z);
  const int half = k / 2;
  const int x = center(lat, m);
  if (lat.distance(x, z) > half) return std::nullopt;
  return conditional_expectation(phi.term(m), lat.ball(x, half));
}

Interaction restrict_interaction(const Interaction& phi, int z, int k) {
  const Lattice& lat = phi.lattice();
  Interaction out(lat);
  for (const auto& [m, op] : phi.terms()) {
    auto cut = restricted_term(phi, m, z, k);
    if (!cut || cut->is_zero()) continue;
    out.add(m & lat.ball(center(lat, m), k / 2), *cut);
  }
  return out;
}

MajoranaPolynomial random_quasilocal(const Lattice& lattice, std::uint64_t seed, int x,
                                     double decay, bool even) {
  lattice.check_site(x);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(even)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  constexpr int kTermsPerShell = 4;

  const int k_max = lattice.exhaustion_radius(x);
  std::vector<MajoranaPolynomial> shells;
  std::vector<double> c;
  Mask inner = 0;
  for (int k = 0; k <= k_max; ++k) {
    const Mask ball = lattice.modes(lattice.ball(x, k));
    const Mask shell = ball & ~inner;
    std::vector<int> shell_modes;
    for (Mask b = shell; b != 0; b &= b - 1) shell_modes.push_back(std::countr_zero(b));
    std::uniform_int_distribution<std::size_t> pick_shell(0, shell_modes.size() - 1);
    std::uniform_int_distribution<Mask> pick_any(0, ~Mask{0});
    MajoranaPolynomial ak(lattice);
    for (int t = 0; t < kTermsPerShell; ++t) {
      const int anchor = shell_modes[pick_shell(rng)];
      Mask mask = (pick_any(rng) & ball) | (Mask{1} << anchor);
      if (even && std::popcount(mask) % 2 != 0) {
        // Toggle one more mode so the monomial becomes even without losing the anchor.
        const Mask others = ball & ~(Mask{1} << anchor);
        std::vector<int> choices;
        for (Mask b = others; b != 0; b &= b - 1) choices.push_back(std::countr_zero(b));
        std::uniform_int_distribution<std::size_t> pick(0, choices.size() - 1);
        mask ^= Mask{1} << choices[pick(rng)];
      }
      ak.add(mask, Complex{gauss(rng), gauss(rng)});
    }
    const double norm = operator_norm(ak);
    if (norm > 0.0) ak *= 1.0 / norm;
    shells.push_back(std::move(ak));
    c.push_back(coef(rng));
    inner = ball;
  }
  double weight = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) weight += std::abs(c[k]) * std::pow(1.0 + k, -decay);
  const double scale = weight > 1.0 ? 1.0 / weight : 1.0;
  MajoranaPolynomial a(lattice);
  for (std::size_t k = 0; k < c.size(); ++k)
    a += (scale * c[k] * std::pow(1.0 + k, -decay)) * shells[k];
  return a;
}

}  // namespace specflow
