#pragma once

#include <cstdint>
#include <string>

#include "admm/block_problem.hpp"
#include "admm/block_vector.hpp"
#include "admm/oracles.hpp"
#include "admm/rng.hpp"

namespace admm {

enum class Family { Dqp, Cauchy, Qpbc };

const char* to_string(Family f);
Family family_from_string(const std::string& name);

// Size key of a generated instance: B blocks of common dimension nbar
// (1 for the coordinate-block QP family), l constraint rows, and the box
// half-width omega (every coordinate lives in [-omega, omega]).
struct InstanceSpec {
  Family family = Family::Dqp;
  std::uint64_t seed = 0;
  int B = 0;
  int nbar = 0;
  int l = 0;
  double omega = 0.0;
};

struct GeneratedInstance {
  InstanceSpec spec;
  BlockProblem problem;
  BlockVector x0;
  BlockVector x_b;          // feasibility witness used to build the rhs
  double slater_distance;   // distance of x_b to the box boundary
};

// Deterministic generation: every matrix/vector draws from its own child
// stream of (seed, field, index), so outputs are a pure function of the
// spec. Stream fields: 0 A_i, 1 x_b, 2 x0, 3 Q, 4 D, 5 r, 6 y_i, 7 z_i,
// 8 alpha_i. Matrices fill row by row.
GeneratedInstance generate_instance(const InstanceSpec& spec);

GeneratedInstance gen_dqp(const InstanceSpec& spec);
GeneratedInstance gen_cauchy(const InstanceSpec& spec);
GeneratedInstance gen_qpbc(const InstanceSpec& spec);

struct SharedParts {
  std::vector<Eigen::MatrixXd> a;
  Eigen::VectorXd b;
  BlockVector x0;
  BlockVector x_b;
};

// A_i i.i.d. standard normal, x_b uniform in [-omega/2, omega/2]^n,
// b = sum_i A_i (x_b)_i, x0 uniform in [-omega/4, omega/4]^n.
SharedParts gen_shared(const InstanceSpec& spec, const std::vector<int>& dims);

// Orthonormal factor from the QR of a standard-normal matrix, columns
// sign-corrected by the R diagonal.
Eigen::MatrixXd random_orthonormal(int n, Rng& rng);

// Diagonal recipe shared by the quadratic families: floor(n/3) zero entries,
// the rest uniform on [-10, 10], redrawn until at least one is negative
// (capped at 1000 attempts).
Eigen::VectorXd indefinite_diagonal(int n, Rng& rng);

}  // namespace admm
