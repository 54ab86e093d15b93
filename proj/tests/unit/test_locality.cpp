#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "specflow/core/dense.hpp"
#include "specflow/locality/interaction.hpp"
#include "specflow/locality/norms.hpp"

using namespace specflow;

namespace {

MajoranaPolynomial hop(const Lattice& lat, int x, int y) {
  const auto h = MajoranaPolynomial::creation(lat, x) * MajoranaPolynomial::annihilation(lat, y);
  return h + h.adjoint();
}

Interaction nn_chain(const Lattice& lat) {
  Interaction phi(lat);
  for (int x = 0; x + 1 < lat.num_sites(); ++x) phi.add(SiteSet::of({x, x + 1}), hop(lat, x, x + 1));
  return phi;
}

Interaction onsite(const Lattice& lat) {
  Interaction phi(lat);
  for (int x = 0; x < lat.num_sites(); ++x) phi.add(SiteSet::single(x), MajoranaPolynomial::number(lat, x));
  return phi;
}

// E_M through traces against Kronecker-built monomials.
oracle::Matrix oracle_expectation(const oracle::Matrix& a, Mask keep, int f) {
  const auto d = Eigen::Index{1} << f;
  oracle::Matrix out = oracle::Matrix::Zero(d, d);
  for (Mask s = 0; s < (Mask{1} << (2 * f)); ++s) {
    if ((s & ~keep) != 0) continue;
    const oracle::Matrix g = oracle::monomial(s, f);
    out += ((g.adjoint() * a).trace() / double(d)) * g;
  }
  return out;
}

}  // namespace

TEST(QuasiLocalNorm, Examples) {
  const auto lat = Lattice::chain(4);
  EXPECT_NEAR(quasi_local_norm(MajoranaPolynomial::number(lat, 0), 3, 0), 1.0, 1e-12);
  EXPECT_NEAR(quasi_local_norm(hop(lat, 0, 1), 2, 0), 2.0, 1e-12);
  const auto a = random_quasilocal(lat, 3, 1, 3.0, false);
  EXPECT_NEAR(quasi_local_norm(Complex(0.0, -2.5) * a, 1.5, 1), 2.5 * quasi_local_norm(a, 1.5, 1),
              1e-10);
}

TEST(QuasiLocalNorm, MatchesDenseOracle) {
  const auto lat = Lattice::chain(3);
  const auto a = random_quasilocal(lat, 11, 0, 2.0, false);
  const oracle::Matrix m = to_dense(a).matrix();
  const double nu = 1.5;
  double tail = 0.0;
  for (int k = 0; k < 3; ++k) {
    Mask keep = 0;
    for (int s = 0; s <= k && s < 3; ++s) keep |= Mask{3} << (2 * s);
    tail = std::max(tail, std::pow(1.0 + k, nu) * oracle::spectral_norm(m - oracle_expectation(m, keep, 3)));
  }
  EXPECT_NEAR(quasi_local_norm(a, nu, 0), oracle::spectral_norm(m) + tail, 1e-10);
}

TEST(QuasiLocalNorm, MonotoneInNu) {
  const auto lat = Lattice::chain(5);
  const auto a = random_quasilocal(lat, 5, 2, 4.0, true);
  double prev = 0.0;
  for (double nu : {0.0, 0.5, 1.0, 2.0, 3.0}) {
    const double v = quasi_local_norm(a, nu, 2);
    EXPECT_GE(v, prev);
    EXPECT_GE(v, operator_norm(a) - 1e-12);
    prev = v;
  }
}

TEST(InteractionNorm, Examples) {
  const auto lat = Lattice::chain(5);
  EXPECT_EQ(interaction_norm(Interaction(lat), 2.0), 0.0);
  EXPECT_NEAR(interaction_norm(onsite(lat), 2.0), 1.0, 1e-12);
  for (double nu : {0.0, 1.0, 2.0, 3.0}) {
    EXPECT_NEAR(interaction_norm(nn_chain(lat), nu), 2.0 * std::pow(2.0, nu), 1e-10);
  }
}

TEST(InteractionNorm, MonotoneInNu) {
  const auto lat = Lattice::chain(4);
  auto phi = nn_chain(lat) + onsite(lat);
  phi.add(SiteSet::of({0, 3}), 0.3 * hop(lat, 0, 3));
  double prev = 0.0;
  for (double nu : {0.0, 1.0, 2.0, 3.0, 4.0}) {
    const double v = interaction_norm(phi, nu);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(Center, OneDimensional) {
  const auto lat = Lattice::chain(6);
  EXPECT_EQ(center(lat, SiteSet::of({0, 1})), 1);
  EXPECT_EQ(center(lat, SiteSet::of({3})), 3);
  EXPECT_EQ(center(lat, SiteSet::of({0, 1, 2})), 1);
  EXPECT_EQ(center(lat, SiteSet::of({0, 1, 2, 3})), 2);
  EXPECT_EQ(center(lat, SiteSet::of({0, 4, 5})), 4);
  EXPECT_THROW(center(lat, SiteSet()), InvalidArgument);
}

TEST(Center, TwoDimensionalTies) {
  const Lattice lat(2, {3, 3});
  // A 2×2 block: all four corners are equidistant; the offset (+,+) has the smallest angle.
  EXPECT_EQ(center(lat, SiteSet::of({0, 1, 3, 4})), 4);
  // Horizontal pair: offsets (+½, 0) at angle 0 and (−½, 0) at angle π.
  EXPECT_EQ(center(lat, SiteSet::of({3, 4})), 4);
  // Vertical pair: offsets at π/2 (upper) and 3π/2 (lower).
  EXPECT_EQ(center(lat, SiteSet::of({1, 4})), 4);
  // Plus shape: the middle site coincides with the center of mass.
  EXPECT_EQ(center(lat, SiteSet::of({1, 3, 4, 5, 7})), 4);
  // Diagonal pair (0,0),(1,1): offsets at 5π/4 and π/4.
  EXPECT_EQ(center(lat, SiteSet::of({0, 4})), 4);
  // Anti-diagonal pair (1,0),(0,1): offsets at 7π/4 and 3π/4.
  EXPECT_EQ(center(lat, SiteSet::of({1, 3})), 3);
}

TEST(GroupByCenter, Examples) {
  const auto lat = Lattice::chain(5);
  const auto on = group_by_center(onsite(lat));
  for (int x = 0; x < 5; ++x)
    EXPECT_EQ(on.at(x).max_coefficient_distance(MajoranaPolynomial::number(lat, x)), 0.0);
  const auto nn = group_by_center(nn_chain(lat));
  EXPECT_TRUE(nn.at(0).is_zero());
  for (int x = 1; x < 5; ++x) EXPECT_EQ(nn.at(x).max_coefficient_distance(hop(lat, x - 1, x)), 0.0);
}

TEST(GroupByCenter, SumsToTotal) {
  const auto lat = Lattice::chain(5);
  auto phi = nn_chain(lat) + onsite(lat);
  phi.add(SiteSet::of({0, 2, 3}), hop(lat, 0, 3) * MajoranaPolynomial::number(lat, 2));
  phi.add(SiteSet::of({0, 4}), 0.2 * hop(lat, 0, 4));
  MajoranaPolynomial sum(lat);
  for (const auto& [x, op] : group_by_center(phi)) sum += op;
  EXPECT_LE(oracle::max_abs(to_dense(sum).matrix() - to_dense(phi.total()).matrix()), 1e-13);
}

TEST(GroupByCenter, LocalizedNormBound) {
  const auto lat = Lattice::chain(5);
  auto phi = nn_chain(lat) + 0.5 * onsite(lat);
  phi.add(SiteSet::of({0, 2}), 0.4 * hop(lat, 0, 2));
  phi.add(SiteSet::of({1, 4}), 0.1 * hop(lat, 1, 4));
  phi.validate();
  for (double nu : {0.0, 1.0, 2.0, 3.0, 4.0}) {
    const double bound = 3.0 * interaction_norm(phi, nu);
    for (const auto& [x, op] : group_by_center(phi)) EXPECT_LE(quasi_local_norm(op, nu, x), bound);
  }
}

TEST(Restrict, FullVolumeUnchanged) {
  const auto lat = Lattice::chain(5);
  const auto phi = nn_chain(lat) + onsite(lat);
  const auto r = restrict_interaction(phi, 2, 10);
  ASSERT_EQ(r.terms().size(), phi.terms().size());
  for (const auto& [m, op] : phi.terms()) EXPECT_EQ(r.term(m).max_coefficient_distance(op), 0.0);
}

TEST(Restrict, ZeroRadiusKeepsCenteredTerm) {
  const auto lat = Lattice::chain(5);
  const auto phi = nn_chain(lat) + onsite(lat);
  const auto r = restrict_interaction(phi, 2, 0);
  // The bond {1,2} and n₂ are centered at 2; the bond is cut to site 2 and
  // loses its hopping entirely.
  ASSERT_EQ(r.terms().size(), 1u);
  EXPECT_EQ(r.term(SiteSet::single(2)).max_coefficient_distance(MajoranaPolynomial::number(lat, 2)), 0.0);
}

TEST(Restrict, InteriorRadiusTwoByEnumeration) {
  const auto lat = Lattice::chain(7);
  const auto phi = nn_chain(lat);
  const int z = 3;
  const auto r = restrict_interaction(phi, z, 2);
  // Bond {x−1, x} is centered at x; retained when |x − z| ≤ 1, i.e. x ∈ {2,3,4}.
  const std::set<SiteSet> expected{SiteSet::of({1, 2}), SiteSet::of({2, 3}), SiteSet::of({3, 4})};
  std::set<SiteSet> got;
  for (const auto& [m, op] : r.terms()) {
    got.insert(m);
    EXPECT_EQ(op.max_coefficient_distance(phi.term(m)), 0.0);
    EXPECT_TRUE(m.subset_of(lat.ball(z, 2)));
  }
  EXPECT_EQ(got, expected);
}

TEST(Restrict, ContractionAndEvenness) {
  const auto lat = Lattice::chain(6);
  auto phi = nn_chain(lat) + onsite(lat);
  phi.add(SiteSet::of({0, 3}), 0.7 * hop(lat, 0, 3));
  phi.add(SiteSet::of({1, 5}), 0.3 * hop(lat, 1, 5) * MajoranaPolynomial::number(lat, 3));
  for (int k = 0; k <= 6; ++k) {
    for (const auto& [m, op] : phi.terms()) {
      const auto cut = restricted_term(phi, m, 2, k);
      if (!cut) continue;
      EXPECT_LE(operator_norm(*cut), operator_norm(op) + 1e-12);
      EXPECT_TRUE(cut->is_even());
    }
    const auto r = restrict_interaction(phi, 2, k);
    for (const auto& [m, op] : r.terms())
      EXPECT_TRUE(op.support_sites().subset_of(lat.ball(2, k)));
  }
}

TEST(RandomQuasilocal, DeterministicEvenBounded) {
  const auto lat = Lattice::chain(5);
  const auto a = random_quasilocal(lat, 42, 2, 3.0, false);
  const auto b = random_quasilocal(lat, 42, 2, 3.0, false);
  EXPECT_EQ(a.max_coefficient_distance(b), 0.0);
  EXPECT_GT(a.max_coefficient_distance(random_quasilocal(lat, 43, 2, 3.0, false)), 0.0);
  const auto e = random_quasilocal(lat, 42, 2, 3.0, true);
  EXPECT_TRUE(parity_projections(e).odd.is_zero());
  EXPECT_LE(operator_norm(a), 2.0);
  EXPECT_LE(operator_norm(e), 2.0);
}

TEST(RandomQuasilocal, QuasiLocalNormBelowSummationBound) {
  const auto lat = Lattice::chain(6);
  const double decay = 4.0;
  for (int seed = 0; seed < 5; ++seed) {
    for (double nu : {0.0, 1.0, 2.0, 2.9}) {
      const int x = seed % 6;
      const auto a = random_quasilocal(lat, static_cast<std::uint64_t>(seed), x, decay, seed % 2 == 0);
      double bound = 0.0;
      for (int k = 0; k <= lat.exhaustion_radius(x); ++k) bound += 2.0 * std::pow(1.0 + k, nu - decay);
      EXPECT_LE(quasi_local_norm(a, nu, x), bound);
    }
  }
}

TEST(CommutatorBound, SeededPairs) {
  const auto lat = Lattice::chain(6);
  int violations = 0;
  for (int pair = 0; pair < 50; ++pair) {
    const int y = pair % 6;
    const int x = (pair * 7 + 3) % 6;
    const auto a = random_quasilocal(lat, 1000 + pair, y, 4.0, true);
    const auto b = random_quasilocal(lat, 2000 + pair, x, 4.0, pair % 3 == 0);
    for (int nu = 0; nu <= 2; ++nu)
      for (int m = 0; m <= 2; ++m) {
        const auto r = commutator_bound(a, y, b, x, nu, m);
        EXPECT_GT(r.rhs, 0.0);
        if (!r.holds()) ++violations;
      }
  }
  EXPECT_EQ(violations, 0);
  const auto odd = random_quasilocal(lat, 1, 0, 4.0, false);
  if (!odd.is_even()) {
    EXPECT_THROW(commutator_bound(odd, 0, odd, 1, 0, 0), InvalidArgument);
  }
}

TEST(QuasiLocalNorm, ProfileMatchesDirect) {
  const auto lat = Lattice::chain(5);
  const auto a = random_quasilocal(lat, 77, 2, 3.0, true);
  const auto p = quasi_local_profile(a, 2);
  EXPECT_EQ(p.tails.size(), static_cast<std::size_t>(lat.exhaustion_radius(2)));
  for (double nu : {0.0, 1.5, 3.0}) EXPECT_DOUBLE_EQ(p.at(nu), quasi_local_norm(a, nu, 2));
}

TEST(InteractionValidation, RejectsBadTerms) {
  const auto lat = Lattice::chain(3);
  Interaction odd(lat);
  odd.add(SiteSet::single(0), MajoranaPolynomial::majorana(lat, 0));
  EXPECT_THROW(odd.validate(), InvalidArgument);
  Interaction outside(lat);
  outside.add(SiteSet::single(0), hop(lat, 0, 1));
  EXPECT_THROW(outside.validate(), InvalidArgument);
  Interaction non_sa(lat);
  non_sa.add(SiteSet::of({0, 1}), MajoranaPolynomial::creation(lat, 0) * MajoranaPolynomial::annihilation(lat, 1));
  EXPECT_THROW(non_sa.validate(), InvalidArgument);
  Interaction empty_set(lat);
  empty_set.add(SiteSet(), MajoranaPolynomial::identity(lat));
  EXPECT_THROW(empty_set.validate(), InvalidArgument);
  EXPECT_NO_THROW((nn_chain(lat) + onsite(lat)).validate());
}

TEST(InteractionFamily, DerivativeCheck) {
  const auto lat = Lattice::chain(3);
  auto h = [lat](double s) { return (1.0 + s * s) * nn_chain(lat) + onsite(lat); };
  auto dh = [lat](double s) { return (2.0 * s) * nn_chain(lat); };
  auto wrong = [lat](double s) { return (3.0 * s) * nn_chain(lat); };
  EXPECT_NO_THROW(InteractionFamily(0.0, 1.0, h, dh).validate());
  EXPECT_THROW(InteractionFamily(0.0, 1.0, h, wrong).validate(), InvalidArgument);
  const InteractionFamily fd(0.0, 1.0, h);
  const auto d = fd.derivative(0.5);
  EXPECT_LT(d.total().max_coefficient_distance(dh(0.5).total()), 1e-8);
}

TEST(InteractionFamily, Tabulated) {
  const auto lat = Lattice::chain(3);
  std::vector<std::pair<double, Interaction>> samples{
      {0.0, nn_chain(lat)}, {1.0, 2.0 * nn_chain(lat)}, {2.0, 4.0 * nn_chain(lat)}};
  const auto fam = InteractionFamily::tabulated(samples);
  EXPECT_LT(fam.at(0.5).total().max_coefficient_distance((1.5 * nn_chain(lat)).total()), 1e-14);
  EXPECT_LT(fam.derivative(1.5).total().max_coefficient_distance((2.0 * nn_chain(lat)).total()), 1e-14);
  EXPECT_NO_THROW(fam.validate());
}

TEST(InteractionSerialization, RoundTrip) {
  const auto lat = Lattice::chain(4);
  const auto phi = nn_chain(lat) + onsite(lat);
  nlohmann::json j;
  to_json(j, phi);
  const auto back = interaction_from_json(lat, nlohmann::json::parse(j.dump()));
  ASSERT_EQ(back.terms().size(), phi.terms().size());
  for (const auto& [m, op] : phi.terms()) EXPECT_EQ(back.term(m).max_coefficient_distance(op), 0.0);
}
