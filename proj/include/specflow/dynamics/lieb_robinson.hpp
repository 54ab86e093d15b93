#pragma once

#include <string>
#include <utility>
#include <vector>

#include "specflow/core/majorana.hpp"
#include "specflow/dynamics/spectral.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

/// One probe operator B placed at distance `distance` from the support of A.
struct LrProbe {
  int distance;
  MajoranaPolynomial op;
};

struct LrRow {
  double t;
  int distance;
  double commutator_norm;
  double envelope_bound;
};

/// Fitted envelope C‖A‖‖B‖|Y|(1+t)^p / (1 + max(0, √dist − c t))^ν.
struct LrEnvelope {
  double c = 0.0;
  double nu = 0.0;
  double prefactor = 0.0;
  double power = 0.0;
};

struct LrProfile {
  std::vector<LrRow> rows;  // ordered by (time index, probe index)
  LrEnvelope fit;
  /// min over rows of envelope_bound − commutator_norm.
  double min_residual = 0.0;

  std::string to_csv() const;
};

/// ‖[α_{0,t}(A), B]‖ over a (time, probe) grid for the fixed Hamiltonian H.
/// At t = 0 the commutator is computed in exact polynomial arithmetic. Throws
/// InvalidArgument if A and every B are odd.
LrProfile lr_commutator_profile(const Interaction& h, const MajoranaPolynomial& a,
                                const std::vector<LrProbe>& probes,
                                const std::vector<double>& times,
                                const std::vector<double>& c_grid = {0.5, 1, 2, 4, 8},
                                const std::vector<double>& nu_grid = {1, 2, 3, 4});

/// (1+x)^ν / (1 + max(0, √(x/n) − t))^{2ν} ≤ n^ν (1+t²)^ν, evaluated in logs.
bool lr_envelope_inequality(double x, double n, double t, double nu);

/// ‖(α_{u,v} − α^k_{u,v})A‖ for k = 0, 1, …, with α^k generated by the family
/// restricted at scale k around z. The last k restricts nothing.
std::vector<double> restriction_convergence(const InteractionFamily& family,
                                            const MajoranaPolynomial& a, int z, double u,
                                            double v);

struct NormGrowth {
  std::vector<double> times;
  std::vector<double> ratios;  // ‖e^{it𝓛_H}A‖_{ν,x} / ‖A‖_{ν,x}
  double fitted_degree = 0.0;  // least-squares slope of log ratio against log(1+t)
};

NormGrowth norm_growth(const Interaction& h, const MajoranaPolynomial& a, double nu, int x,
                       const std::vector<double>& times);

/// ‖𝓛_Φ A‖_{ν,x} / (‖Φ‖_{d+1+2ν} ‖A‖_{d+3+2ν,x}); reported, never asserted.
double sum_representation_ratio(const Interaction& phi, const MajoranaPolynomial& a, double nu,
                                int x);

}  // namespace specflow
