#include "specflow/kernels/spectral_quadrature.hpp"

#include <cmath>
#include <cstdint>

namespace specflow::kernels {
namespace {

void check_grid(std::span<const double> nodes, std::span<const double> weights) {
  if (nodes.size() != weights.size())
    throw InvalidArgument("quadrature nodes and weights differ in length");
}

}  // namespace

Matrix spectral_kernel(const RealVector& energies, std::span<const double> nodes,
                       std::span<const double> weights, Parity parity) {
  check_grid(nodes, weights);
  const Eigen::Index n = energies.size();
  const auto q = static_cast<Eigen::Index>(nodes.size());
  if (n == 0) return Matrix(0, 0);
  // Shifting every energy by E_0 leaves differences unchanged and keeps the
  // phases small.
  const double e0 = energies(0);
  Eigen::MatrixXd s(n, q), c(n, q);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(q); ++k) {
    const double t = nodes[static_cast<std::size_t>(k)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double phase = (energies(i) - e0) * t;
      s(i, k) = std::sin(phase);
      c(i, k) = std::cos(phase);
    }
  }
  const Eigen::Map<const Eigen::VectorXd> v(weights.data(), q);
  if (parity == Parity::Odd) {
    // Σ_q v_q 2i sin((E_i − E_j) t_q), with sin(a − b) = sin a cos b − cos a sin b.
    const Eigen::MatrixXd m = s * v.asDiagonal() * c.transpose();
    return Complex{0.0, 2.0} * (m - m.transpose()).cast<Complex>();
  }
  const Eigen::MatrixXd sv = s * v.asDiagonal();
  const Eigen::MatrixXd cv = c * v.asDiagonal();
  const Eigen::MatrixXd k = 2.0 * (cv * c.transpose() + sv * s.transpose());
  return k.cast<Complex>();
}

namespace reference {

Matrix spectral_kernel(const RealVector& energies, std::span<const double> nodes,
                       std::span<const double> weights, Parity parity) {
  check_grid(nodes, weights);
  const Eigen::Index n = energies.size();
  Matrix k = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = energies(i) - energies(j);
      Complex acc = 0.0;
      for (std::size_t p = 0; p < nodes.size(); ++p) {
        const Complex plus = std::polar(1.0, w * nodes[p]);
        const Complex minus = std::polar(1.0, -w * nodes[p]);
        acc += weights[p] * (parity == Parity::Even ? plus + minus : plus - minus);
      }
      k(i, j) = acc;
    }
  }
  return k;
}

}  // namespace reference
}  // namespace specflow::kernels
