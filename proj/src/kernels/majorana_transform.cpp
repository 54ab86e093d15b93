#include "specflow/kernels/majorana_transform.hpp"

#include <bit>
#include <cstdint>

namespace specflow::kernels {
namespace {

constexpr Mask low_bits(int k) { return (Mask{1} << k) - 1; }

inline double zsign(Mask z, Mask b) { return (std::popcount(z & b) & 1) ? -1.0 : 1.0; }

// In-place unnormalized Walsh-Hadamard transform: v[z] <- Σ_b (−1)^{z·b} v[b].
void walsh_hadamard(Complex* v, std::size_t n) {
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * len) {
      for (std::size_t j = i; j < i + len; ++j) {
        const Complex a = v[j];
        const Complex b = v[j + len];
        v[j] = a + b;
        v[j + len] = a - b;
      }
    }
  }
}

void check_dims(const Matrix& m, int num_fermions) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << num_fermions);
  if (m.rows() != dim || m.cols() != dim)
    throw LatticeMismatch("matrix dimension does not match 2^(fermion count)");
}

}  // namespace

JwImage jw_image(Mask monomial) {
  JwImage img;
  for (Mask rest = monomial; rest != 0; rest &= rest - 1) {
    const int p = std::countr_zero(rest);
    const int k = p / 2;
    const Mask x2 = Mask{1} << k;
    const Mask z2 = (p & 1) ? (low_bits(k) | x2) : low_bits(k);
    const Complex p2 = (p & 1) ? Complex{0.0, -1.0} : Complex{1.0, 0.0};
    // (p1, x1, z1)·(p2, x2, z2) = (p1 p2 (−1)^{z1·x2}, x1 ⊕ x2, z1 ⊕ z2)
    img.phase *= p2 * zsign(img.zmask, x2);
    img.flip ^= x2;
    img.zmask ^= z2;
  }
  return img;
}

std::vector<Complex> majorana_coefficients(const Matrix& m, int num_fermions) {
  check_dims(m, num_fermions);
  const std::size_t dim = std::size_t{1} << num_fermions;
  const std::size_t count = dim * dim;
  // table(z, x) = Σ_b (−1)^{z·b} M(b ⊕ x, b); column x is contiguous.
  Matrix table(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
#pragma omp parallel for schedule(static)
  for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(dim); ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    Complex* col = table.col(static_cast<Eigen::Index>(x)).data();
    for (std::size_t b = 0; b < dim; ++b)
      col[b] = m(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b));
    walsh_hadamard(col, dim);
  }
  std::vector<Complex> coeffs(count);
  const double inv_dim = 1.0 / static_cast<double>(dim);
#pragma omp parallel for schedule(static)
  for (std::int64_t si = 0; si < static_cast<std::int64_t>(count); ++si) {
    const auto img = jw_image(static_cast<Mask>(si));
    coeffs[static_cast<std::size_t>(si)] =
        std::conj(img.phase) * table(img.zmask, img.flip) * inv_dim;
  }
  return coeffs;
}

Matrix majorana_synthesis(std::span<const Complex> coefficients, int num_fermions) {
  const std::size_t dim = std::size_t{1} << num_fermions;
  if (coefficients.size() != dim * dim)
    throw LatticeMismatch("coefficient vector length does not match 4^(fermion count)");
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix table = Matrix::Zero(d, d);
  // Each (flip, zmask) pair is hit by exactly one monomial, so the scatter is race-free.
#pragma omp parallel for schedule(static)
  for (std::int64_t si = 0; si < static_cast<std::int64_t>(dim * dim); ++si) {
    const Complex c = coefficients[static_cast<std::size_t>(si)];
    if (c == Complex{}) continue;
    const auto img = jw_image(static_cast<Mask>(si));
    table(img.zmask, img.flip) = c * img.phase;
  }
  Matrix out(d, d);
#pragma omp parallel for schedule(static)
  for (std::int64_t xi = 0; xi < static_cast<std::int64_t>(dim); ++xi) {
    const auto x = static_cast<std::size_t>(xi);
    Complex* col = table.col(static_cast<Eigen::Index>(x)).data();
    walsh_hadamard(col, dim);
    for (std::size_t b = 0; b < dim; ++b)
      out(static_cast<Eigen::Index>(b ^ x), static_cast<Eigen::Index>(b)) = col[b];
  }
  return out;
}

Matrix sparse_synthesis(std::span<const std::pair<Mask, Complex>> terms, int num_fermions) {
  const std::size_t dim = std::size_t{1} << num_fermions;
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix out = Matrix::Zero(d, d);
  for (const auto& [mask, c] : terms) {
    const auto img = jw_image(mask);
    const Complex amp = c * img.phase;
    for (std::size_t b = 0; b < dim; ++b)
      out(static_cast<Eigen::Index>(b ^ img.flip), static_cast<Eigen::Index>(b)) +=
          amp * zsign(img.zmask, static_cast<Mask>(b));
  }
  return out;
}

namespace reference {

Matrix monomial_matrix(Mask monomial, int num_fermions) {
  const std::size_t dim = std::size_t{1} << num_fermions;
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t b0 = 0; b0 < dim; ++b0) {
    Mask state = static_cast<Mask>(b0);
    Complex amp = 1.0;
    // Rightmost factor acts first.
    for (int p = 2 * num_fermions - 1; p >= 0; --p) {
      if (!((monomial >> p) & 1u)) continue;
      const int k = p / 2;
      const bool occupied = (state >> k) & 1u;
      const double string = (std::popcount(state & low_bits(k)) & 1) ? -1.0 : 1.0;
      if (p % 2 == 0) {
        amp *= string;  // a + a^†
      } else {
        amp *= Complex{0.0, occupied ? 1.0 : -1.0} * string;  // i(a − a^†)
      }
      state ^= Mask{1} << k;
    }
    out(static_cast<Eigen::Index>(state), static_cast<Eigen::Index>(b0)) = amp;
  }
  return out;
}

std::vector<Complex> majorana_coefficients(const Matrix& m, int num_fermions) {
  check_dims(m, num_fermions);
  const std::size_t dim = std::size_t{1} << num_fermions;
  std::vector<Complex> coeffs(dim * dim);
  for (std::size_t s = 0; s < dim * dim; ++s) {
    const Matrix gamma = monomial_matrix(static_cast<Mask>(s), num_fermions);
    coeffs[s] = (gamma.adjoint() * m).trace() / static_cast<double>(dim);
  }
  return coeffs;
}

Matrix majorana_synthesis(std::span<const Complex> coefficients, int num_fermions) {
  const std::size_t dim = std::size_t{1} << num_fermions;
  if (coefficients.size() != dim * dim)
    throw LatticeMismatch("coefficient vector length does not match 4^(fermion count)");
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t s = 0; s < dim * dim; ++s)
    if (coefficients[s] != Complex{})
      out += coefficients[s] * monomial_matrix(static_cast<Mask>(s), num_fermions);
  return out;
}

}  // namespace reference
}  // namespace specflow::kernels
