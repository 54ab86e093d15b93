#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "specflow/core/dense.hpp"
#include "specflow/flow/checks.hpp"
#include "specflow/harness/models.hpp"
#include "specflow/locality/norms.hpp"

using namespace specflow;

namespace {

const FilterFunction& filter_at(double g) {
  static const FilterFunction f1 = FilterFunction::build({1.0, 6, 0.9, 1e-8});
  static const FilterFunction f04 = FilterFunction::build({0.4, 6, 0.9, 1e-8});
  return g == 1.0 ? f1 : f04;
}

Matrix total(const Interaction& phi) { return to_dense(phi.total()).matrix(); }
Matrix dense(const MajoranaPolynomial& p) { return to_dense(p).matrix(); }

// Staggered hopping chain with J(s) = 1 + 0.5 s, coded from Kronecker
// fermion operators.
Matrix oracle_hopping_chain(int sites, double s) {
  const double j = 1.0 + 0.5 * s;
  const Eigen::Index d = Eigen::Index{1} << sites;
  Matrix h = Matrix::Zero(d, d);
  for (int x = 0; x < sites; ++x) h += (x % 2 == 0 ? 0.5 : -0.5) * oracle::number(x, sites);
  for (int x = 0; x + 1 < sites; ++x) {
    const Matrix t = oracle::creator(x, sites) * oracle::annihilator(x + 1, sites);
    h -= j * (t + t.adjoint());
  }
  return h;
}

Matrix oracle_ground_projection(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXcd v = es.eigenvectors().col(0);
  return v * v.adjoint();
}

InteractionFamily hopping_gauge(int sites) {
  return models::linear_family(Lattice::chain(sites), {0.0, 0.5, 1.0, 0.0, 0.0}, {0.0, 0.0, 0.5, 0.0, 0.0});
}

InteractionFamily kitaev_path(int sites, double mu = 3.0) {
  return models::linear_family(Lattice::chain(sites), {mu, 0.0, 0.0, 0.0, 0.0}, {0.0, 0.0, 1.0, 1.0, 0.0});
}

FlowOptions flow_options(double declared_gap) {
  FlowOptions o;
  o.declared_gap = declared_gap;
  return o;
}

}  // namespace

TEST(InverseLiouvillian, MatchesEigenbasisOracle) {
  const auto& f = filter_at(1.0);
  std::mt19937_64 rng(5);
  const Matrix h = oracle::random_hermitian(rng, 6);
  const Matrix a = oracle::random_matrix(rng, 6);
  const auto spec = diagonalize(h);
  const auto inv = inverse_liouvillian_op(f, spec, a);
  EXPECT_LE(inv.quad_residual, 1e-7);
  const Matrix got = spec.to_eigenbasis(inv.value);
  const Matrix ae = spec.to_eigenbasis(a);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      const double omega = spec.energies(i) - spec.energies(j);
      const Complex expect =
          i == j ? Complex{} : oracle::fourier_W_direct(omega, f.coefficients(), f.normalization(), 8.0 * f.cutoff()) * ae(i, j);
      EXPECT_LT(std::abs(got(i, j) - expect), 1e-6) << i << ',' << j;
    }
  // The same average by time-domain quadrature against exact evolution.
  const Eigen::Index n = spec.energies.size();
  const auto direct = quad_against(f, [&](double t) { return heisenberg_evolve(spec, a, t); }, FilterMode::W,
                                   spec.energies(n - 1) - spec.energies(0));
  EXPECT_LT(max_norm(direct.value - inv.value), 1e-7);
}

TEST(InverseLiouvillian, CommutesWithAdjoint) {
  const auto& f = filter_at(1.0);
  std::mt19937_64 rng(6);
  const auto spec = diagonalize(Matrix(oracle::random_hermitian(rng, 8)));
  const Matrix a = oracle::random_matrix(rng, 8);
  const Matrix lhs = inverse_liouvillian_op(f, spec, a.adjoint()).value;
  const Matrix rhs = inverse_liouvillian_op(f, spec, a).value.adjoint();
  EXPECT_LE(max_norm(lhs - rhs), 1e-9);
}

TEST(ODecompose, Examples) {
  const auto& f = filter_at(1.0);
  std::mt19937_64 rng(7);
  Matrix h = oracle::random_hermitian(rng, 5);
  // Separate the ground level by at least g.
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXd e = es.eigenvalues();
  for (int i = 1; i < 5; ++i) e(i) += 2.0;
  h = es.eigenvectors() * e.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();

  const auto commuting = od_decompose(f, h, Matrix(h * h));
  EXPECT_LT(max_norm(commuting.off_diagonal), 1e-8);
  const auto self = od_decompose(f, h, h);
  EXPECT_LT(max_norm(self.off_diagonal), 1e-8);
  EXPECT_LT(max_norm(self.diagonal - h), 1e-7);
  const auto id = od_decompose(f, h, Matrix::Identity(5, 5));
  EXPECT_LT(max_norm(id.diagonal - Matrix::Identity(5, 5)), 1e-8);
  EXPECT_LT(max_norm(id.off_diagonal), 1e-8);

  Matrix two = Matrix::Zero(2, 2);
  two(1, 1) = 2.0 * f.gap();
  Matrix flip = Matrix::Zero(2, 2);
  flip(0, 1) = flip(1, 0) = 1.0;
  const auto od = od_decompose(f, two, flip);
  EXPECT_LT(max_norm(od.off_diagonal - flip), 1e-7);
  EXPECT_LT(max_norm(od.diagonal), 1e-7);
}

TEST(ODecompose, RefusesSmallGap) {
  const auto& f = filter_at(1.0);
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 0.5;
  EXPECT_THROW(od_decompose(f, h, Matrix::Identity(2, 2)), HypothesisError);
}

TEST(ODecompose, RandomOnGappedChain) {
  const auto& f = filter_at(1.0);
  const Matrix h = total(kitaev_path(4).at(0.5));
  const auto spec = diagonalize(h);
  ASSERT_GE(spec.gap, f.gap());
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const Matrix a = oracle::random_matrix(rng, 16);
    const auto od = od_decompose(f, h, spec, a);
    EXPECT_LE(od.split_residual(), 1e-7);
    EXPECT_LE(od.ground_block(spec).max(), 1e-6);
    const Matrix herm = 0.5 * (a + a.adjoint());
    const auto hd = od_decompose(f, h, spec, herm);
    EXPECT_LE(max_norm(hd.diagonal - hd.diagonal.adjoint()), 1e-8);
    EXPECT_LE(max_norm(hd.off_diagonal - hd.off_diagonal.adjoint()), 1e-8);
  }
}

TEST(ODecompose, GroundStateFactorization) {
  const auto& f = filter_at(1.0);
  const Matrix h = total(kitaev_path(4).at(1.0));
  const auto spec = diagonalize(h);
  ASSERT_EQ(spec.ground_degeneracy, 1);
  const Matrix& p = spec.ground_projection;
  std::mt19937_64 rng(9);
  const Matrix a = oracle::random_matrix(rng, 16);
  const auto od = od_decompose(f, h, spec, a);
  for (int k = 0; k < 10; ++k) {
    const Matrix b = oracle::random_matrix(rng, 16);
    const Complex lhs = (p * b.adjoint() * od.diagonal).trace();
    const Complex rhs = (p * b.adjoint()).trace() * (p * a).trace();
    EXPECT_LT(std::abs(lhs - rhs), 1e-6);
  }
}

TEST(InteractionInverse, ZeroInteraction) {
  const auto& f = filter_at(1.0);
  const auto lat = Lattice::chain(3);
  const auto inv = inverse_liouvillian_interaction(f, models::build(lat, {2.0, 0.0, 0.5, 0.3, 0.0}), Interaction(lat));
  for (const auto& g : inv.generators) {
    EXPECT_TRUE(g.bulk.is_zero());
    for (const auto& s : g.shells) EXPECT_TRUE(s.is_zero());
  }
}

TEST(InteractionInverse, TelescopingSupportAndOracle) {
  const auto& f = filter_at(1.0);
  const auto lat = Lattice::chain(4);
  const Interaction h = models::build(lat, {2.5, 0.3, 0.7, 0.4, 0.6});
  const Interaction phi = models::build(lat, {0.2, -0.4, 1.0, 0.5, 0.0});
  const auto inv = inverse_liouvillian_interaction(f, h, phi);
  ASSERT_EQ(inv.generators.size(), 4u);
  const auto groups = group_by_center(h);
  const auto spec = diagonalize(h);
  const Matrix phi_total = total(phi);
  for (const auto& g : inv.generators) {
    EXPECT_LE(g.reassembly_residual, 1e-12);
    EXPECT_TRUE(g.bulk.is_self_adjoint(1e-10));
    EXPECT_TRUE(g.bulk.is_even());
    for (std::size_t k = 0; k < g.shells.size(); ++k)
      EXPECT_TRUE(g.shells[k].support_sites().subset_of(lat.ball(g.x, static_cast<int>(k))));
    // Eigenbasis oracle: entries G(E_i − E_j) [Φ, H_x]_ij with the inner
    // integral done in closed form and the outer one by direct quadrature.
    const Matrix b = spec.to_eigenbasis(commutator(phi_total, dense(groups.at(g.x))));
    const Matrix got = spec.to_eigenbasis(to_dense(g.bulk).matrix());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < b.rows(); ++i)
      for (Eigen::Index j = 0; j < b.cols(); ++j) {
        if (std::abs(b(i, j)) < 1e-14) continue;
        const double omega = spec.energies(i) - spec.energies(j);
        const Complex gk = oracle::inner_kernel_direct(std::abs(omega) < 1e-12 ? 0.0 : omega, f.coefficients(),
                                                       f.normalization(), 8.0 * f.cutoff());
        worst = std::max(worst, std::abs(got(i, j) - gk * b(i, j)));
      }
    EXPECT_LT(worst, 1e-5) << g.x;
  }
}

TEST(InteractionInverse, DerivationEqualityAndFlowForm) {
  const auto& f = filter_at(1.0);
  const auto lat = Lattice::chain(4);
  const Interaction h = models::build(lat, {2.5, 0.3, 0.7, 0.4, 0.6});
  const Interaction phi = models::build(lat, {0.0, 0.0, 1.0, 0.5, 0.0});
  const auto inv = inverse_liouvillian_interaction(f, h, phi);
  std::mt19937_64 rng(10);
  for (int k = 0; k < 3; ++k) EXPECT_LE(derivation_residual(f, h, phi, inv, oracle::random_matrix(rng, 16)), 1e-5);
  // Σ_x 𝓘(Φ)_{x,*} = 𝓘(Φ_total), and the shells reassemble into the same operator.
  const auto spec = diagonalize(h);
  const Matrix whole = inverse_liouvillian_op(f, spec, total(phi)).value;
  EXPECT_LE(operator_norm(Matrix(inv.bulk_sum() - whole)), 1e-5);
  EXPECT_LE(operator_norm(Matrix(total(inv.as_interaction()) - inv.bulk_sum())), 1e-11);
}

TEST(FlowGenerator, ConstantFamilyIsZero) {
  const auto& f = filter_at(1.0);
  const auto fam = models::linear_family(Lattice::chain(3), {2.0, 0.0, 0.5, 0.0, 0.0}, {});
  EXPECT_EQ(max_norm(flow_generator(f, fam, 0.3).generator), 0.0);
}

TEST(FlowGenerator, LinearFamilyMatchesOracle) {
  const auto& f = filter_at(1.0);
  const auto fam = kitaev_path(3);
  const auto sample = flow_generator(f, fam, 0.6);
  EXPECT_LE(max_norm(sample.generator - sample.generator.adjoint()), 1e-9);
  const auto& spec = sample.spectrum;
  const Matrix v = spec.to_eigenbasis(total(models::build(Lattice::chain(3), {0.0, 0.0, 1.0, 1.0, 0.0})));
  const Matrix got = spec.to_eigenbasis(sample.generator);
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      const double omega = spec.energies(i) - spec.energies(j);
      const Complex expect = std::abs(omega) < 1e-12
                                 ? Complex{}
                                 : -oracle::fourier_W_direct(omega, f.coefficients(), f.normalization(),
                                                             8.0 * f.cutoff()) * v(i, j);
      EXPECT_LT(std::abs(got(i, j) - expect), 1e-6);
    }
}

TEST(FlowGenerator, GaugeInvariantFamilyCommutesWithN) {
  const auto& f = filter_at(0.4);
  const auto fam = hopping_gauge(4);
  const Matrix n = number_operator_matrix(Lattice::chain(4));
  const auto d = flow_generator(f, fam, 0.5).generator;
  EXPECT_GT(operator_norm(d), 1e-3);
  EXPECT_LE(operator_norm(commutator(d, n)), 1e-8);
}

TEST(FlowGenerator, MissingDerivative) {
  const auto& f = filter_at(1.0);
  const auto lat = Lattice::chain(2);
  const InteractionFamily fam(0.0, 1.0, [lat](double s) { return models::build(lat, {1.0 + s, 0.0, 0.2, 0.0, 0.0}); });
  GeneratorOptions opts;
  opts.allow_finite_difference = false;
  EXPECT_THROW(flow_generator(f, fam, 0.5, opts), InvalidArgument);
  EXPECT_NO_THROW(flow_generator(f, fam, 0.5));
}

TEST(Transport, ConstantFamilyIsTrivial) {
  const auto fam = models::linear_family(Lattice::chain(4), {2.0, 0.0, 0.5, 0.0, 0.0}, {});
  const auto run = run_flow(fam, uniform_grid(0.0, 1.0, 8), flow_options(1.0));
  for (const auto& u : run.unitaries) EXPECT_LE(max_norm(u - Matrix::Identity(u.rows(), u.cols())), 1e-10);
  EXPECT_LE(run.max_transport_error(), 1e-10);
}

TEST(Transport, SingleSiteDriver) {
  const auto fam = models::linear_family(Lattice::chain(1), {1.0, 0.0, 0.0, 0.0, 0.0}, {1.0, 0.0, 0.0, 0.0, 0.0});
  const auto run = run_flow(fam, uniform_grid(0.0, 1.0, 8), flow_options(0.9));
  EXPECT_LE(run.max_transport_error(), 1e-6);
  const auto t = transport(run, 2, 7);
  EXPECT_LE(t.error, 1e-6);
}

TEST(Transport, GapGateRefuses) {
  const auto fam = kitaev_path(4, 1.0);
  EXPECT_THROW(run_flow(fam, uniform_grid(0.0, 1.0, 8), flow_options(1.0)), GapGateError);
  try {
    run_flow(fam, uniform_grid(0.0, 1.0, 8), flow_options(1.0));
  } catch (const GapGateError& e) {
    EXPECT_LT(e.gap(), 1.0);
    EXPECT_FALSE(e.spectrum().empty());
  }
}

TEST(Transport, MatchesHilbertSpaceParallelTransport) {
  const int sites = 4;
  const auto fam = hopping_gauge(sites);
  // The library's dense Hamiltonian agrees with the Kronecker construction.
  EXPECT_LE(max_norm(total(fam.at(0.3)) - oracle_hopping_chain(sites, 0.3)), 1e-12);

  const int steps = 32;
  const auto run = run_flow(fam, uniform_grid(0.0, 1.0, steps), flow_options(0.4));
  EXPECT_LE(run.max_transport_error(), 1e-4);

  // Reference propagator with K_s = i[Ṗ_s, P_s] from finite-difference Ṗ.
  const double fd = 1e-4;
  const Eigen::Index d = Eigen::Index{1} << sites;
  Matrix v = Matrix::Identity(d, d);
  const Matrix p0 = oracle_ground_projection(oracle_hopping_chain(sites, 0.0));
  for (int j = 0; j < steps; ++j) {
    const double h = 1.0 / steps;
    const double mid = (j + 0.5) * h;
    const Matrix p = oracle_ground_projection(oracle_hopping_chain(sites, mid));
    const Matrix pdot = (oracle_ground_projection(oracle_hopping_chain(sites, mid + fd)) -
                         oracle_ground_projection(oracle_hopping_chain(sites, mid - fd))) /
                        (2.0 * fd);
    const Matrix k = Complex{0.0, 1.0} * (pdot * p - p * pdot);
    v = v * oracle::expi_hermitian(k, h);
    const Matrix moved = v.adjoint() * p0 * v;
    const Matrix truth = oracle_ground_projection(oracle_hopping_chain(sites, (j + 1) * h));
    EXPECT_LE(oracle::spectral_norm(moved - truth), 1e-4);
    const Matrix& u = run.unitaries[static_cast<std::size_t>(j + 1)];
    EXPECT_LE(oracle::spectral_norm(u.adjoint() * run.spectra.front().ground_projection * u - moved), 2e-4);
  }
}

TEST(Transport, GaugeCovariance) {
  const auto run = run_flow(hopping_gauge(4), uniform_grid(0.0, 1.0, 8), flow_options(0.4));
  EXPECT_LE(gauge_covariance(run), 1e-7);
  EXPECT_NE(run.to_csv().find("s,gap,gen_norm,transport_error,quad_residual\r\n"), std::string::npos);
}

TEST(Checks, ParallelTransportAndDerivativeSwitch) {
  const auto run = run_flow(hopping_gauge(6), uniform_grid(0.0, 1.0, 4), flow_options(0.4));
  const auto samples = random_operators(64, 20, 11);
  for (std::size_t i : {std::size_t{1}, std::size_t{2}, std::size_t{3}}) {
    const auto r = parallel_transport_check(run, i, samples);
    EXPECT_TRUE(r.pass()) << r.max_diagonal << " vs " << r.bound;
    EXPECT_GT(r.max_plain, 1e-3);
    EXPECT_LE(derivative_switch_check(run, i, samples), 1e-5);
  }
  const Matrix id = Matrix::Identity(64, 64);
  EXPECT_LE(parallel_transport_check(run, 1, {id}).max_diagonal, 1e-6);
  EXPECT_LE(derivative_switch_check(run, 1, {id}), 1e-12);
  EXPECT_LE(derivative_switch_check(run, 1, {total(run.family.at(run.grid[1]))}), 1e-5);
}

TEST(Checks, ConstantFamilyParallelTransport) {
  const auto fam = models::linear_family(Lattice::chain(3), {2.0, 0.0, 0.5, 0.0, 0.0}, {});
  const auto run = run_flow(fam, uniform_grid(0.0, 1.0, 2), flow_options(1.0));
  const auto r = parallel_transport_check(run, 1, random_operators(8, 5, 3));
  EXPECT_EQ(r.max_plain, 0.0);
  EXPECT_TRUE(r.pass());
}

TEST(Checks, Goldstone) {
  const auto lat = Lattice::chain(6);
  const Interaction h = hopping_gauge(6).at(0.5);
  const Interaction n = models::number_interaction(lat);
  const std::vector<double> phis{0.3, 1.1, 2.0, 3.0};
  const auto samples = random_operators(64, 10, 12);
  const auto r = goldstone_check(h, n, phis, samples);
  EXPECT_LE(r.projection_commutator, 1e-8);
  EXPECT_LE(r.invariance, 1e-6);
  // β generated by H itself leaves the ground state stationary.
  EXPECT_LE(goldstone_check(h, h, phis, samples).invariance, 1e-8);
  // Pairing terms break the gauge symmetry; the check refuses.
  EXPECT_THROW(goldstone_check(kitaev_path(6).at(1.0), n, phis, samples), HypothesisError);
}
