#pragma once

#include <span>

#include "specflow/core/types.hpp"

namespace specflow::kernels {

/// Symmetry of the quadrature weights under t → −t.
enum class Parity { Even, Odd };

/// K_ij = Σ_q v_q e^{i(E_i − E_j) t_q} over a grid symmetric about 0, given
/// only its positive half (t_q > 0, v_q). Even weights give a real kernel,
/// odd weights a purely imaginary one.
///
/// Evaluated as two real GEMMs over sin/cos tables of the energies.
Matrix spectral_kernel(const RealVector& energies, std::span<const double> nodes,
                       std::span<const double> weights, Parity parity);

namespace reference {

/// Direct triple loop over (i, j, q).
Matrix spectral_kernel(const RealVector& energies, std::span<const double> nodes,
                       std::span<const double> weights, Parity parity);

}  // namespace reference
}  // namespace specflow::kernels
