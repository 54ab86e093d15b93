#include "specflow/dynamics/cocycle.hpp"

#include <string>

#include "specflow/core/dense.hpp"
#include "specflow/dynamics/spectral.hpp"

namespace specflow {

DenseGenerator dense_generator(const InteractionFamily& family) {
  return [family](double s) { return to_dense(family.at(s).total()).matrix(); };
}

Matrix cocycle_propagate(const DenseGenerator& gen, double u, double v, int steps) {
  if (steps < 1) throw InvalidArgument("cocycle propagation needs at least one step");
  const double h = (v - u) / steps;
  Matrix first = gen(u + 0.5 * h);
  const Eigen::Index d = first.rows();
  Matrix w = Matrix::Identity(d, d);
  for (int k = 0; k < steps; ++k) {
    Matrix phi = k == 0 ? std::move(first) : gen(u + (k + 0.5) * h);
    if (max_norm(phi - phi.adjoint()) > 1e-9 * std::max(1.0, max_norm(phi)))
      throw InvalidArgument("cocycle generator is not Hermitian");
    w = w * expi_hermitian(phi, h);
  }
  return w;
}

AdaptiveResult cocycle_propagate_adaptive(const DenseGenerator& gen, double u, double v, double tol,
                                          int initial_steps, int max_steps) {
  int steps = std::max(1, initial_steps);
  Matrix prev = cocycle_propagate(gen, u, v, steps);
  while (true) {
    steps *= 2;
    if (steps > max_steps)
      throw ConvergenceError("cocycle step halving exceeded " + std::to_string(max_steps) + " steps");
    Matrix next = cocycle_propagate(gen, u, v, steps);
    const double change = max_norm(next - prev);
    if (change < tol) return {std::move(next), steps, change};
    prev = std::move(next);
  }
}

Matrix CocycleRun::between(std::size_t i, std::size_t j) const {
  return unitaries.at(i).adjoint() * unitaries.at(j);
}

CocycleRun run_cocycle(const DenseGenerator& gen, std::vector<double> grid, int substeps) {
  if (grid.empty()) throw InvalidArgument("cocycle grid is empty");
  CocycleRun run;
  run.grid = std::move(grid);
  if (run.grid.size() == 1) {
    const Eigen::Index d = gen(run.grid.front()).rows();
    run.unitaries.push_back(Matrix::Identity(d, d));
    return run;
  }
  for (std::size_t j = 1; j < run.grid.size(); ++j) {
    Matrix step = cocycle_propagate(gen, run.grid[j - 1], run.grid[j], substeps);
    if (j == 1) run.unitaries.push_back(Matrix::Identity(step.rows(), step.cols()));
    run.unitaries.push_back(run.unitaries.back() * step);
  }
  return run;
}

}  // namespace specflow
