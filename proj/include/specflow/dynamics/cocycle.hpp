#pragma once

#include <functional>
#include <vector>

#include "specflow/core/types.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow {

/// s ↦ dense Hermitian generator (the total of Φ_s).
using DenseGenerator = std::function<Matrix(double)>;

DenseGenerator dense_generator(const InteractionFamily& family);

/// U_{u,v} with ∂_v U = i U Φ_v and U_{u,u} = 1, so that α_{u,v}(A) = U A U^†,
/// by `steps` midpoint factors U ← U·exp(i h Φ_mid).
Matrix cocycle_propagate(const DenseGenerator& gen, double u, double v, int steps);

struct AdaptiveResult {
  Matrix unitary;
  int steps = 0;
  double last_change = 0.0;  // max-norm difference between the last two halvings
};

/// Halves the step until successive products differ by less than `tol` in
/// max-norm. Throws ConvergenceError past `max_steps`.
AdaptiveResult cocycle_propagate_adaptive(const DenseGenerator& gen, double u, double v,
                                          double tol = 1e-8, int initial_steps = 1,
                                          int max_steps = 1 << 14);

/// Accumulated unitaries U_{s_0, s_j} on a grid, propagated interval by
/// interval with a fixed number of midpoint substeps.
struct CocycleRun {
  std::vector<double> grid;
  std::vector<Matrix> unitaries;

  /// U_{s_i, s_j} = U_{s_0,s_i}^† U_{s_0,s_j}.
  Matrix between(std::size_t i, std::size_t j) const;
};

CocycleRun run_cocycle(const DenseGenerator& gen, std::vector<double> grid, int substeps);

}  // namespace specflow
