#pragma once

#include <optional>
#include <string>
#include <vector>

#include "specflow/dynamics/spectral.hpp"
#include "specflow/filter/filter.hpp"
#include "specflow/flow/inverse_liouvillian.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

/// The computed gap fell below the declared one at some grid point.
class GapGateError : public Error {
 public:
  GapGateError(const std::string& what, double s, double gap, std::vector<double> spectrum)
      : Error(what), s_(s), gap_(gap), spectrum_(std::move(spectrum)) {}

  double s() const { return s_; }
  double gap() const { return gap_; }
  /// Lowest eigenvalues at the failing point.
  const std::vector<double>& spectrum() const { return spectrum_; }

 private:
  double s_;
  double gap_;
  std::vector<double> spectrum_;
};

struct GeneratorOptions {
  QuadratureOptions quadrature;
  bool allow_finite_difference = true;
  double fd_step = 1e-5;
};

struct GeneratorSample {
  double s = 0.0;
  SpectralData spectrum;
  Matrix generator;  // D_s
  int panels = 0;
  double quad_residual = 0.0;  // max-norm change of D_s against half the panels
};

/// D_s = −𝓘_s(Ḣ_s) with Ḣ_s the total of the family's derivative. Throws
/// InvalidArgument if the family has no analytic derivative and finite
/// differences are disallowed.
GeneratorSample flow_generator(const FilterFunction& f, const InteractionFamily& family, double s,
                               const GeneratorOptions& opts = {});

struct FlowOptions {
  double declared_gap = 1.0;
  bool clamp_gap = true;  // filter gap g = min(declared, 1)
  FilterParams filter;    // its gap field is replaced by g
  int substeps = 1;       // midpoint factors per grid interval
  GeneratorOptions generator;
};

struct FlowPoint {
  double s = 0.0;
  double gap = 0.0;
  double gen_norm = 0.0;         // ‖D_s‖
  double transport_error = 0.0;  // ‖U^† P_{s_0} U − P_s‖ with U = U_{s_0,s}
  double quad_residual = 0.0;
};

struct FlowRun {
  InteractionFamily family;
  FilterParams filter;
  int panels = 0;
  int substeps = 1;
  std::vector<double> grid;
  std::vector<SpectralData> spectra;
  std::vector<Matrix> generators;  // D at the grid points
  std::vector<Matrix> unitaries;   // U_{s_0, s_j}
  std::vector<FlowPoint> points;

  /// U_{s_i, s_j}.
  Matrix between(std::size_t i, std::size_t j) const;
  double max_transport_error() const;
  /// Columns s, gap, gen_norm, transport_error, quad_residual.
  std::string to_csv() const;
};

std::vector<double> uniform_grid(double s0, double s1, int steps);

/// Diagonalizes every grid point and throws GapGateError if any gap is below
/// `declared_gap`. Returns the spectra.
std::vector<SpectralData> gap_gate(const InteractionFamily& family, const std::vector<double>& grid,
                                   double declared_gap);

/// Gap gate, generators at the grid points and at the midpoints of every
/// substep, then the ordered product U ← U·exp(i h D_mid). Without a fixed
/// panel count, the largest adaptive count over the grid is used everywhere.
FlowRun run_flow(const InteractionFamily& family, std::vector<double> grid, const FlowOptions& opts);

struct TransportResult {
  Matrix unitary;      // U_{s_i, s_j}
  Matrix transported;  // U^† P_{s_i} U
  double error = 0.0;  // ‖U^† P_{s_i} U − P_{s_j}‖
};

TransportResult transport(const FlowRun& run, std::size_t i, std::size_t j);

struct TransportConvergence {
  int steps = 0;
  int panels = 0;
  double base_error = 0.0;
  double refined_error = 0.0;  // half the step, twice the panels
  double floor = 1e-8;

  /// Reduction by at least 2×, or both errors already at the floor.
  bool converging() const;
};

TransportConvergence transport_convergence(const InteractionFamily& family, int steps, const FlowOptions& opts);

}  // namespace specflow
