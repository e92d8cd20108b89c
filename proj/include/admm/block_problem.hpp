#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "admm/block_vector.hpp"
#include "admm/box.hpp"

namespace admm {

// Smooth part f of the objective. Gradients are closed-form per instance
// family; there is no automatic differentiation. Implementations must be
// safe to call concurrently (read-only evaluation).
class SmoothOracle {
 public:
  virtual ~SmoothOracle() = default;

  virtual double value(const BlockVector& x) const = 0;

  // Gradient of f with respect to block t at the (possibly mixed) point x.
  virtual void grad_block(int t, const BlockVector& x, Eigen::Ref<Eigen::VectorXd> out) const = 0;

  // Second derivative of the block-restricted map u -> f(x_{<t}, u, x_{>t})
  // when that map is quadratic in u (constant curvature). Enables exact
  // one-dimensional block solves; nullopt means no closed form.
  virtual std::optional<double> quadratic_coeff(int /*t*/) const { return std::nullopt; }

  // f(x) - f(x with block t replaced by u). The default subtracts two full
  // evaluations, which cancels catastrophically when the step is small
  // against a large objective; family oracles override it with difference
  // forms whose error scales with the step.
  virtual double value_decrease(int t, const BlockVector& x, const Eigen::Ref<const Eigen::VectorXd>& u) const {
    BlockVector other = x;
    other.block(t) = u;
    return value(x) - value(other);
  }
};

// Instance of the linearly constrained block-separable composite problem:
//   min f(y) + sum_t h_t(y_t)  s.t.  sum_t A_t y_t = b,
// with h_t a box indicator. Immutable after construction; per-block spectral
// norms of A_t are precomputed.
class BlockProblem {
 public:
  BlockProblem(std::vector<int> dims, std::shared_ptr<const SmoothOracle> smooth,
               std::vector<Eigen::MatrixXd> constraint_blocks, Eigen::VectorXd rhs, std::vector<BoxIndicator> boxes,
               std::optional<Eigen::VectorXd> weak_convexity = std::nullopt,
               std::optional<Eigen::VectorXd> cross_block_lipschitz = std::nullopt);

  int blocks() const { return static_cast<int>(dims_.size()); }
  int dim() const { return n_; }
  int constraint_rows() const { return l_; }
  const std::vector<int>& dims() const { return dims_; }

  const SmoothOracle& smooth() const { return *smooth_; }
  const Eigen::MatrixXd& constraint_block(int t) const { return a_[t]; }
  const Eigen::VectorXd& rhs() const { return b_; }
  const BoxIndicator& box(int t) const { return boxes_[t]; }
  const std::vector<BoxIndicator>& boxes() const { return boxes_; }

  const std::optional<Eigen::VectorXd>& weak_convexity() const { return m_; }
  // L_{>t} metadata, t = 1..B-1: Lipschitz moduli of grad_t f in the trailing
  // blocks. Optional; exact for the quadratic families, absent for others.
  const std::optional<Eigen::VectorXd>& cross_block_lipschitz() const { return l_gt_; }

  double block_op_norm(int t) const { return a_norm_[t]; }
  double block_op_norm_sq(int t) const { return a_norm_[t] * a_norm_[t]; }

  BlockVector zero_point() const { return BlockVector(dims_); }

  // A y - b.
  Eigen::VectorXd residual(const BlockVector& y) const;
  // A* p split blockwise into a BlockVector.
  BlockVector adjoint_apply(const Eigen::VectorXd& p) const;

  bool in_domain(const BlockVector& y, double tol = 0.0) const;
  void require_in_domain(const BlockVector& y) const;

  // Full gradient of f, all blocks.
  BlockVector smooth_gradient(const BlockVector& y) const;

 private:
  std::vector<int> dims_;
  int n_ = 0;
  int l_ = 0;
  std::shared_ptr<const SmoothOracle> smooth_;
  std::vector<Eigen::MatrixXd> a_;
  Eigen::VectorXd b_;
  std::vector<BoxIndicator> boxes_;
  std::optional<Eigen::VectorXd> m_;
  std::optional<Eigen::VectorXd> l_gt_;
  std::vector<double> a_norm_;
};

// Augmented Lagrangian L_c(y; p) = f(y) + h(y) + <p, Ay-b> + (c/2)||Ay-b||^2,
// where h vanishes on its domain. Throws if y leaves the domain so that all
// arithmetic stays finite.
double eval_al(const BlockProblem& problem, const BlockVector& y, const Eigen::VectorXd& p, double c);

// Smooth part of the AL and its gradient with respect to block t:
//   grad_t f(y) + A_t^T (p + c (Ay - b)).
std::pair<double, Eigen::VectorXd> eval_smooth_al_grad(const BlockProblem& problem, int t, const BlockVector& y,
                                                       const Eigen::VectorXd& p, double c);

// Spectral norm by power iteration on G = M^T M, relative tolerance 1e-10,
// capped at 10000 iterations.
double spectral_norm(const Eigen::MatrixXd& m);

}  // namespace admm
