#pragma once

#include <cstdint>
#include <Eigen/Core>

namespace admm {

// Portable xoshiro256** generator. Instances are cheap value types; all
// sampling goes through explicit methods so that generated streams are
// reproducible across platforms and independent of the C++ standard
// library's distribution implementations.
class Rng {
 public:
  // Seeds the state by running splitmix64 from `seed`.
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit();

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal via the Marsaglia polar method (uses only sqrt/log).
  double normal();

  Eigen::VectorXd normal_vector(int n);
  Eigen::MatrixXd normal_matrix(int rows, int cols);  // filled row by row
  Eigen::VectorXd uniform_vector(int n, double lo, double hi);

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Child stream derivation: every matrix/vector drawn by the instance
// generators gets its own stream identified by a (field, index) pair, so
// adding new fields never perturbs draws of existing ones. The child seed
// mixes (seed, field, index) through splitmix64.
Rng child_stream(std::uint64_t seed, std::uint32_t field, std::uint32_t index);

}  // namespace admm
