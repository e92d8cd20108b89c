#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "admm/adap_fista.hpp"
#include "admm/block_problem.hpp"
#include "admm/block_vector.hpp"
#include "admm/theory_constants.hpp"

namespace admm {

// Minimizes q(u) = (alpha/2) u^2 + beta u over [lo, hi]. For alpha > 0 the
// clamped vertex; otherwise the better endpoint, ties resolved to lo.
double exact_1d_box_quadratic(double alpha, double beta, double lo, double hi);

struct SweepInput {
  BlockVector z;
  Eigen::VectorXd p;
  Eigen::VectorXd lambda;
  double c = 0.0;
};

struct BlockSweepStats {
  double lambda_accepted = 0.0;
  int halvings_test = 0;    // acceptance-test failures
  int halvings_inner = 0;   // inner-solver failures
  long inner_iterations = 0;
  long backtracks = 0;
  bool exact = false;
  double r_norm = 0.0;
  double eps = 0.0;
  double step_norm = 0.0;       // ||z_t^+ - z_t||
  double al_decrease = 0.0;     // accepted L_c drop contributed by this block
  double accept_rhs = 0.0;      // (1/(8 lambda)) step^2 + (c/4)||A_t step||^2
};

struct SweepOutput {
  BlockVector z_plus;
  BlockVector v_plus;
  double delta_plus = 0.0;
  Eigen::VectorXd lambda_plus;
  std::vector<BlockSweepStats> per_block;
  double al_before = 0.0;
  double al_after = 0.0;
  // Sum of the accepted per-block L_c drops; telescopes to
  // al_before - al_after and is nonnegative by construction in adaptive
  // mode (each accepted drop passed the test as computed).
  double al_decrease = 0.0;
};

struct BlockTraceRecord {
  int t = 0;
  double lambda = 0.0;
  int halvings = 0;
  long inner_iterations = 0;
  double step_norm = 0.0;
};
using BlockTraceFn = std::function<void(const BlockTraceRecord&)>;

struct SweepOptions {
  bool adaptive = true;
  double lambda_floor = 1e-12;
  FistaParams fista;
  // 0: no extra checks; 1: cheap bookkeeping checks; 2: also recompute the
  // incremental L_c from scratch, verify the residual-pair inclusion via the
  // eps-subdifferential gap, and (constant mode, with constants supplied)
  // the residual bound against (zeta1 + c zeta2) * Delta L_c.
  int check_level = 1;
  const TheoryConstants* constants = nullptr;
  BlockTraceFn trace;
};

// Inner-solver failure in constant-stepsize mode, or a stepsize driven
// below the floor: both abort the sweep.
struct SweepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlockSolveResult {
  bool ok = false;
  FistaStatus inner_status = FistaStatus::Success;
  Eigen::VectorXd z_plus;
  Eigen::VectorXd r;
  // Normal-cone element of the certificate r in grad psi_s(z_plus) +
  // partial(lambda h)(z_plus): r = grad psi_s(z_plus) + cone with exact
  // zeros at inactive coordinates.
  Eigen::VectorXd cone;
  double eps = 0.0;
  long inner_iterations = 0;
  long backtracks = 0;
  bool exact = false;
};

enum class BlockMethod { Auto, Exact1D, Fista };

// Finds a (1/8; z_t)-stationary solution of the t-th proximal AL subproblem
//   min_u lambda_t Lhat_c(z_mixed with u; p) + (1/2)||u - z_t||^2 + lambda_t h_t(u),
// where z_mixed carries the already-updated leading blocks and z_t is its
// t-th block. One-dimensional quadratic blocks are solved exactly, giving
// residual (0, 0); otherwise the accelerated inner solver runs with
// (sigma, x0, M0, mu0) = (1/8, z_t, max(M0_config, lambda_t c ||A_t||^2), 1/2).
// w_mixed, when given, must equal A z_mixed - b.
BlockSolveResult solve_block_subproblem(const BlockProblem& problem, int t, const BlockVector& z_mixed,
                                        const Eigen::VectorXd& p, double c, double lambda_t, BlockMethod method,
                                        const FistaParams& fista, const Eigen::VectorXd* w_mixed = nullptr);

// Residual of block t from the sweep data:
//   v_t = grad_t f(z^+) - grad_t f(z^+_{<=t}, z_{>t}) + r_t/lambda_t
//         + c A_t^T sum_{s>t} A_s (z_s^+ - z_s) - (z_t^+ - z_t)/lambda_t.
// Standalone reference form; the sweep computes the same quantity with
// cached constraint residuals.
Eigen::VectorXd compute_block_residual(const BlockProblem& problem, int t, const BlockVector& z,
                                       const BlockVector& z_plus, const Eigen::VectorXd& r_t, double lambda_t,
                                       double c);

// One Gauss-Seidel sweep with fixed prox stepsizes (lambda_plus = lambda);
// an inner-solver failure aborts the sweep.
SweepOutput bipp_sweep(const SweepInput& input, const BlockProblem& problem, const SweepOptions& options);

// Adaptive sweep: per block, the stepsize is halved until the inner solver
// succeeds and the candidate passes the descent acceptance test
//   L_c(prev) - L_c(cand) >= (1/(8 lambda)) ||step||^2 + (c/4) ||A_t step||^2.
// Accepted stepsizes are returned for reuse by the caller.
SweepOutput abipp_sweep(const SweepInput& input, const BlockProblem& problem, const SweepOptions& options);

}  // namespace admm
