#include "specflow/core/dense.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <vector>

#include <nlohmann/json.hpp>

#include "specflow/kernels/majorana_transform.hpp"

namespace specflow {

DenseOperator::DenseOperator(Lattice lattice, Matrix matrix)
    : lattice_(std::move(lattice)), matrix_(std::move(matrix)) {
  const auto d = static_cast<Eigen::Index>(lattice_.hilbert_dim());
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw LatticeMismatch("matrix is " + std::to_string(matrix_.rows()) + "x" +
                          std::to_string(matrix_.cols()) + ", lattice needs " + std::to_string(d));
}

DenseOperator DenseOperator::identity(const Lattice& lattice) {
  const auto d = static_cast<Eigen::Index>(lattice.hilbert_dim());
  return {lattice, Matrix::Identity(d, d)};
}

DenseOperator DenseOperator::zero(const Lattice& lattice) {
  const auto d = static_cast<Eigen::Index>(lattice.hilbert_dim());
  return {lattice, Matrix::Zero(d, d)};
}

bool DenseOperator::is_hermitian(double tol) const {
  return max_norm(matrix_ - matrix_.adjoint()) <= tol;
}

DenseOperator& DenseOperator::operator+=(const DenseOperator& o) {
  require_same_lattice(lattice_, o.lattice_);
  matrix_ += o.matrix_;
  return *this;
}

DenseOperator& DenseOperator::operator-=(const DenseOperator& o) {
  require_same_lattice(lattice_, o.lattice_);
  matrix_ -= o.matrix_;
  return *this;
}

DenseOperator operator*(const DenseOperator& a, const DenseOperator& b) {
  require_same_lattice(a.lattice_, b.lattice_);
  return {a.lattice_, a.matrix_ * b.matrix_};
}

DenseOperator to_dense(const MajoranaPolynomial& a) {
  std::vector<std::pair<Mask, Complex>> terms(a.terms().begin(), a.terms().end());
  return {a.lattice(), kernels::sparse_synthesis(terms, a.lattice().num_fermions())};
}

MajoranaPolynomial from_dense(const DenseOperator& m) {
  const auto coeffs = kernels::majorana_coefficients(m.matrix(), m.lattice().num_fermions());
  MajoranaPolynomial out(m.lattice());
  for (std::size_t s = 0; s < coeffs.size(); ++s)
    if (std::abs(coeffs[s]) >= kPruneThreshold) out.add(static_cast<Mask>(s), coeffs[s]);
  return out;
}

double max_norm(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const double scale = max_norm(m);
  if (scale == 0.0) return 0.0;
  if (max_norm(m - m.adjoint()) <= 1e-14 * scale) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double operator_norm(const DenseOperator& m) { return operator_norm(m.matrix()); }

double operator_norm(const MajoranaPolynomial& a) {
  if (a.is_zero()) return 0.0;
  // Relabelling the used modes to 0..r−1 in order is an isomorphism of the
  // Clifford algebras they generate, so the norm is unchanged.
  const Mask used = a.support_modes();
  const int r = std::popcount(used);
  const int fermions = (r + 1) / 2;
  std::vector<int> relabel(32, -1);
  int next = 0;
  for (Mask b = used; b != 0; b &= b - 1) relabel[std::countr_zero(b)] = next++;
  std::vector<std::pair<Mask, Complex>> terms;
  terms.reserve(a.size());
  for (const auto& [mask, c] : a.terms()) {
    Mask m = 0;
    for (Mask b = mask; b != 0; b &= b - 1) m |= Mask{1} << relabel[std::countr_zero(b)];
    terms.emplace_back(m, c);
  }
  return operator_norm(kernels::sparse_synthesis(terms, fermions));
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
  require_same_lattice(a.lattice(), b.lattice());
  return {a.lattice(), commutator(a.matrix(), b.matrix())};
}

Complex tracial_state(const DenseOperator& m) {
  return m.matrix().trace() / static_cast<double>(m.dim());
}

DenseOperator gauge_transform(const DenseOperator& m, double phi) {
  Matrix out = m.matrix();
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const int nc = std::popcount(static_cast<std::uint64_t>(c));
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const int nr = std::popcount(static_cast<std::uint64_t>(r));
      out(r, c) *= std::polar(1.0, phi * (nr - nc));
    }
  }
  return {m.lattice(), std::move(out)};
}

DenseOperator conditional_expectation(const DenseOperator& m, SiteSet sites) {
  m.lattice().check_sites(sites);
  const int f = m.lattice().num_fermions();
  auto coeffs = kernels::majorana_coefficients(m.matrix(), f);
  const Mask keep = m.lattice().modes(sites);
  for (std::size_t s = 0; s < coeffs.size(); ++s)
    if ((static_cast<Mask>(s) & ~keep) != 0) coeffs[s] = 0.0;
  return {m.lattice(), kernels::majorana_synthesis(coeffs, f)};
}

Matrix number_operator_matrix(const Lattice& lattice) {
  const auto d = static_cast<Eigen::Index>(lattice.hilbert_dim());
  Matrix n = Matrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) n(b, b) = std::popcount(static_cast<std::uint64_t>(b));
  return n;
}

void to_json(nlohmann::json& j, const Lattice& lattice) {
  j = nlohmann::json{{"dimension", lattice.dimension()},
                     {"extent", lattice.extents()},
                     {"orbitals", lattice.orbitals()}};
}

Lattice lattice_from_json(const nlohmann::json& j) {
  return Lattice(j.at("dimension").get<int>(), j.at("extent").get<std::vector<int>>(),
                 j.value("orbitals", 1));
}

void to_json(nlohmann::json& j, const MajoranaPolynomial& a) {
  auto terms = nlohmann::json::array();
  for (const auto& [mask, c] : a.terms()) {
    char hex[16];
    std::snprintf(hex, sizeof hex, "0x%x", static_cast<unsigned>(mask));
    terms.push_back({{"mask", hex}, {"re", c.real()}, {"im", c.imag()}});
  }
  nlohmann::json lat;
  to_json(lat, a.lattice());
  j = nlohmann::json{{"lattice", lat}, {"terms", terms}};
}

MajoranaPolynomial polynomial_from_json(const nlohmann::json& j) {
  MajoranaPolynomial p(lattice_from_json(j.at("lattice")));
  for (const auto& t : j.at("terms")) {
    const auto text = t.at("mask").get<std::string>();
    std::size_t used = 0;
    const unsigned long mask = std::stoul(text, &used, 16);
    if (used != text.size()) throw InvalidArgument("malformed monomial mask '" + text + "'");
    p.add(static_cast<Mask>(mask), Complex{t.at("re").get<double>(), t.at("im").get<double>()});
  }
  return p;
}

}  // namespace specflow
