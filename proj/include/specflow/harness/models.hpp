#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "specflow/core/majorana.hpp"
#include "specflow/locality/interaction.hpp"

namespace specflow::models {

/// a_x^† a_y + a_y^† a_x on orbital 0.
MajoranaPolynomial hopping(const Lattice& lattice, int x, int y);
/// a_x a_y + a_y^† a_x^† on orbital 0.
MajoranaPolynomial pairing(const Lattice& lattice, int x, int y);
/// n_x n_y on orbital 0.
MajoranaPolynomial density_density(const Lattice& lattice, int x, int y);

/// Nearest-neighbour bonds (x, y), x < y: along the chain, or right and up on a square.
std::vector<std::pair<int, int>> bonds(const Lattice& lattice);

/// Couplings of a fermionic chain or square with one orbital per site:
///   Σ_x (μ + δ(−1)^x) n_x − J Σ_b hop_b + Δ Σ_b pair_b + V Σ_b n_x n_y.
struct Couplings {
  double mu = 0.0;
  double stagger = 0.0;  // δ
  double hop = 0.0;      // J
  double pair = 0.0;     // Δ
  double density = 0.0;  // V
};

Interaction build(const Lattice& lattice, const Couplings& c);

/// Φ({x}) = n_x: the interaction whose total is N.
Interaction number_interaction(const Lattice& lattice);

/// s ↦ build(at0 + s·slope) on [s0, s1]. The analytic derivative is
/// build(slope); an all-zero slope gives a constant family.
InteractionFamily linear_family(const Lattice& lattice, const Couplings& at0, const Couplings& slope, double s0 = 0.0,
                                double s1 = 1.0);

}  // namespace specflow::models
