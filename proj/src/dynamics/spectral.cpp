#include "specflow/dynamics/spectral.hpp"

#include <cmath>
#include <limits>

namespace specflow {

SpectralData diagonalize(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw InvalidArgument("Hamiltonian must be square and nonempty");
  const double scale = std::max(1.0, max_norm(h));
  if (max_norm(h - h.adjoint()) > 1e-12 * scale) throw InvalidArgument("Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
  SpectralData out;
  out.energies = es.eigenvalues();
  out.vectors = es.eigenvectors();
  const double e0 = out.energies(0);
  Eigen::Index g = 0;
  while (g < out.energies.size() && out.energies(g) - e0 <= kGroundClusterTol) ++g;
  out.ground_degeneracy = static_cast<int>(g);
  out.gap = g < out.energies.size() ? out.energies(g) - e0 : std::numeric_limits<double>::infinity();
  const Matrix v0 = out.vectors.leftCols(g);
  out.ground_projection = v0 * v0.adjoint();
  return out;
}

SpectralData diagonalize(const DenseOperator& h) { return diagonalize(h.matrix()); }

SpectralData diagonalize(const Interaction& h) { return diagonalize(to_dense(h.total())); }

MajoranaPolynomial liouvillian_apply(const Interaction& phi, const MajoranaPolynomial& a) {
  require_same_lattice(phi.lattice(), a.lattice());
  MajoranaPolynomial out(a.lattice());
  for (const auto& [m, op] : phi.terms()) out += commutator(op, a);
  return out;
}

DenseOperator liouvillian_apply(const Interaction& phi, const DenseOperator& a) {
  require_same_lattice(phi.lattice(), a.lattice());
  return commutator(to_dense(phi.total()), a);
}

Matrix heisenberg_evolve(const SpectralData& h, const Matrix& a, double t) {
  if (t == 0.0) return a;
  const Eigen::Index n = h.energies.size();
  Eigen::VectorXcd phase(n);
  for (Eigen::Index i = 0; i < n; ++i) phase(i) = std::polar(1.0, (h.energies(i) - h.energies(0)) * t);
  const Matrix ae = h.to_eigenbasis(a);
  return h.from_eigenbasis(phase.asDiagonal() * ae * phase.conjugate().asDiagonal());
}

Matrix expi_hermitian(const Matrix& x, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x);
  if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
  Eigen::VectorXcd phase(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) phase(i) = std::polar(1.0, t * es.eigenvalues()(i));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace specflow
