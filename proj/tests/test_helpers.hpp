#pragma once

#include <functional>
#include <memory>

#include "admm/adap_fista.hpp"
#include "admm/block_problem.hpp"
#include "admm/oracles.hpp"
#include "admm/rng.hpp"

namespace admm::testing {

// Scalar problem with f = 0 used by several hand-worked examples:
// one block of dimension 1, constraint a*y = b, box [-w, w].
inline BlockProblem scalar_problem(double a, double b, double w) {
  auto oracle = std::make_shared<BlockSeparableQuadraticOracle>(
      std::vector<Eigen::MatrixXd>{Eigen::MatrixXd::Zero(1, 1)}, std::vector<Eigen::VectorXd>{Eigen::VectorXd::Zero(1)});
  return BlockProblem({1}, oracle, {Eigen::MatrixXd::Constant(1, 1, a)}, Eigen::VectorXd::Constant(1, b),
                      {BoxIndicator::centered(1, w)}, Eigen::VectorXd::Zero(1));
}

// Central finite difference of the block-t smooth AL value w.r.t. coordinate
// j of the block; h = 1e-6 (1 + ||y||) per the gradient-check contract.
inline double smooth_al_fd(const BlockProblem& problem, int t, int j, const BlockVector& y, const Eigen::VectorXd& p,
                           double c) {
  const double h = 1e-6 * (1.0 + y.norm());
  BlockVector hi = y, lo = y;
  hi.block(t)[j] += h;
  lo.block(t)[j] -= h;
  const auto f = [&](const BlockVector& point) {
    const Eigen::VectorXd w = problem.residual(point);
    return problem.smooth().value(point) + p.dot(w) + 0.5 * c * w.squaredNorm();
  };
  return (f(hi) - f(lo)) / (2.0 * h);
}

// Uniform interior sample of the problem's box domain (strictly inside so
// finite-difference probes stay feasible).
inline BlockVector random_interior_point(const BlockProblem& problem, Rng& rng, double shrink = 0.9) {
  BlockVector y(problem.dims());
  for (int t = 0; t < problem.blocks(); ++t) {
    const auto& box = problem.box(t);
    for (int j = 0; j < box.dim(); ++j) {
      const double mid = 0.5 * (box.lo[j] + box.hi[j]);
      const double half = 0.5 * (box.hi[j] - box.lo[j]) * shrink;
      y.block(t)[j] = mid + rng.uniform(-half, half);
    }
  }
  return y;
}

// Random strongly convex quadratic psi(x) = 1/2 (x-a)'H(x-a) with
// eigenvalues in [mu_min, mu_max], plus its exact curvature bounds.
struct RandomQuadratic {
  Eigen::MatrixXd h;
  Eigen::VectorXd a;
  double mu_min = 0.0;
  double mu_max = 0.0;
};

RandomQuadratic random_quadratic(int dim, double mu_lo, double mu_hi, Rng& rng);

class QuadraticSubOracle final : public SubproblemOracle {
 public:
  QuadraticSubOracle(Eigen::MatrixXd h, Eigen::VectorXd a) : h_(std::move(h)), a_(std::move(a)) {}
  double value(const Eigen::VectorXd& u) const override { return 0.5 * (u - a_).dot(h_ * (u - a_)); }
  void gradient(const Eigen::VectorXd& u, Eigen::Ref<Eigen::VectorXd> out) const override {
    out.noalias() = h_ * (u - a_);
  }

 private:
  Eigen::MatrixXd h_;
  Eigen::VectorXd a_;
};

// Projected-gradient reference solver: fixed step 1/L, iterated until the
// prox-gradient fixed-point residual falls below tol.
Eigen::VectorXd projected_gradient_min(const SubproblemOracle& oracle, const BoxIndicator& box,
                                       const Eigen::VectorXd& x0, double lipschitz, double tol, long max_iters);

}  // namespace admm::testing
