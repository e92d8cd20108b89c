#pragma once

#include <optional>

#include "admm/block_problem.hpp"
#include "admm/block_vector.hpp"

namespace admm {

// Strictly interior feasible point and its distance to the box boundary.
struct SlaterData {
  BlockVector x_bar;
  double d_bar = 0.0;
};

// Constants entering the per-iteration residual bounds and the multiplier
// bound diagnostic:
//   zeta1 = 100 max{1, max_t m_t} + 24 L^2 + 1,
//   zeta2 = 24 (B - 1) ||A||_dagger^2,  ||A||_dagger = sqrt(sum_t ||A_t||^2),
//   L = sqrt(sum_{t<B} L_{>t}^2).
struct TheoryConstants {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double L = 0.0;
  double a_dagger_norm = 0.0;
  // True when the problem supplied no L_{>t} metadata, in which case L = 0
  // and zeta1 is a lower estimate.
  bool L_is_lower_estimate = false;
  std::optional<double> upsilon_C;

  // Bounded-domain diagnostics, filled only when requested.
  std::optional<double> D_h;
  std::optional<double> nabla_f_sup;
  std::optional<double> nu_plus_A;
  // Objective range over the box by corner enumeration: exact for functions
  // whose extrema sit at vertices, a heuristic otherwise.
  std::optional<double> phi_sup;
  std::optional<double> phi_inf;
};

// Computes the constants above. m_t is required (taken from the problem).
// upsilon needs Slater data and C; its ||grad f|| supremum is evaluated by
// box-corner enumeration, exact for quadratic oracles and a heuristic
// otherwise, and is limited to n <= corner_dim_cap dimensions.
TheoryConstants compute_theory_constants(const BlockProblem& problem,
                                         const std::optional<SlaterData>& slater = std::nullopt,
                                         std::optional<double> C = std::nullopt, int corner_dim_cap = 20,
                                         bool objective_range = false);

// Smallest positive singular value of the stacked [A_1 ... A_B]; singular
// values below 1e-10 * ||A|| count as zero.
double smallest_positive_singular_value(const BlockProblem& problem);

}  // namespace admm
