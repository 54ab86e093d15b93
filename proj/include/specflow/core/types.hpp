#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace specflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Bitmask over Majorana modes; bit p set means m_p is a factor of the monomial.
using Mask = std::uint32_t;

inline constexpr Complex kI{0.0, 1.0};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different lattices, or a matrix does not match its lattice.
class LatticeMismatch : public Error {
 public:
  using Error::Error;
};

/// A precondition on the input was violated (non-Hermitian generator, bad site, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature or step-halving did not reach its tolerance under the cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A theorem hypothesis (symmetry, nondegeneracy, spectral separation) does not hold.
class HypothesisError : public Error {
 public:
  using Error::Error;
};

}  // namespace specflow
