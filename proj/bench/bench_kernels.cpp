#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "specflow/core/parallel.hpp"
#include "specflow/kernels/majorana_transform.hpp"
#include "specflow/kernels/spectral_quadrature.hpp"

using namespace specflow;

namespace {

Matrix random_matrix(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

struct Grid {
  RealVector energies;
  std::vector<double> nodes, weights;
};

Grid grid(Eigen::Index dim, int nodes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-10, 10);
  Grid g;
  g.energies = RealVector(dim);
  for (Eigen::Index i = 0; i < dim; ++i) g.energies(i) = u(rng);
  std::sort(g.energies.data(), g.energies.data() + dim);
  for (int q = 0; q < nodes; ++q) {
    g.nodes.push_back(0.05 * (q + 1));
    g.weights.push_back(std::exp(-0.01 * q));
  }
  return g;
}

// range(0): fermions; range(1): workers (0 = all cores).
void BM_CoefficientsFast(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  set_worker_count(static_cast<int>(state.range(1)));
  const Matrix m = random_matrix(Eigen::Index{1} << n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::majorana_coefficients(m, n));
  set_worker_count(0);
}

void BM_CoefficientsReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix m = random_matrix(Eigen::Index{1} << n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::reference::majorana_coefficients(m, n));
}

// range(0): dimension; range(1): workers.
void BM_SpectralKernelFast(benchmark::State& state) {
  const Grid g = grid(state.range(0), 512);
  set_worker_count(static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::spectral_kernel(g.energies, g.nodes, g.weights, kernels::Parity::Odd));
  set_worker_count(0);
}

void BM_SpectralKernelReference(benchmark::State& state) {
  const Grid g = grid(state.range(0), 512);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernels::reference::spectral_kernel(g.energies, g.nodes, g.weights, kernels::Parity::Odd));
}

}  // namespace

BENCHMARK(BM_CoefficientsReference)->Arg(4)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoefficientsFast)->ArgsProduct({{4, 5, 6, 8}, {1, 0}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralKernelReference)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpectralKernelFast)->ArgsProduct({{64, 256, 1024}, {1, 0}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
