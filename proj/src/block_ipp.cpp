#include "admm/block_ipp.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace admm {
namespace {

// Smooth part of the t-th block subproblem as a function of the block
// variable u, with every other block frozen at z_mixed. The workspace point
// and residual are mutated per evaluation; instances are confined to one
// sweep and never shared.
class BlockSubproblemOracle final : public SubproblemOracle {
 public:
  BlockSubproblemOracle(const BlockProblem& problem, int t, const BlockVector& z_mixed, const Eigen::VectorXd& p,
                        double c, double lambda, const Eigen::VectorXd* w_mixed)
      : problem_(problem), t_(t), p_(p), c_(c), lambda_(lambda), point_(z_mixed), z_t_(z_mixed.block(t)) {
    Eigen::VectorXd w = w_mixed ? *w_mixed : problem.residual(z_mixed);
    w_rest_ = w - problem.constraint_block(t) * z_t_;
    grad_buf_.resize(problem.dims()[t]);
  }

  double value(const Eigen::VectorXd& u) const override {
    point_.block(t_) = u;
    w_buf_ = w_rest_;
    w_buf_.noalias() += problem_.constraint_block(t_) * u;
    const double smooth_al = problem_.smooth().value(point_) + p_.dot(w_buf_) + 0.5 * c_ * w_buf_.squaredNorm();
    return lambda_ * smooth_al + 0.5 * (u - z_t_).squaredNorm();
  }

  void gradient(const Eigen::VectorXd& u, Eigen::Ref<Eigen::VectorXd> out) const override {
    point_.block(t_) = u;
    w_buf_ = w_rest_;
    w_buf_.noalias() += problem_.constraint_block(t_) * u;
    problem_.smooth().grad_block(t_, point_, grad_buf_);
    grad_buf_.noalias() += problem_.constraint_block(t_).transpose() * (p_ + c_ * w_buf_);
    out = lambda_ * grad_buf_ + (u - z_t_);
  }

  double value_gap(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const override {
    point_.block(t_) = from;
    const double f_gap = -problem_.smooth().value_decrease(t_, point_, to);
    const Eigen::VectorXd d = to - from;
    w_buf_ = w_rest_;
    w_buf_.noalias() += problem_.constraint_block(t_) * from;
    const Eigen::VectorXd a_d = problem_.constraint_block(t_) * d;
    const double al_gap = p_.dot(a_d) + c_ * w_buf_.dot(a_d) + 0.5 * c_ * a_d.squaredNorm();
    const double prox_gap = (0.5 * (from + to) - z_t_).dot(d);
    return lambda_ * (f_gap + al_gap) + prox_gap;
  }

 private:
  const BlockProblem& problem_;
  int t_;
  const Eigen::VectorXd& p_;
  double c_;
  double lambda_;
  mutable BlockVector point_;
  Eigen::VectorXd z_t_;
  Eigen::VectorXd w_rest_;
  mutable Eigen::VectorXd w_buf_;
  mutable Eigen::VectorXd grad_buf_;
};

SweepOutput run_sweep(const SweepInput& input, const BlockProblem& problem, const SweepOptions& options);

}  // namespace

double exact_1d_box_quadratic(double alpha, double beta, double lo, double hi) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) throw std::invalid_argument("exact_1d_box_quadratic: non-finite");
  if (lo > hi) throw std::invalid_argument("exact_1d_box_quadratic: lo > hi");
  if (alpha > 0) return std::min(std::max(-beta / alpha, lo), hi);
  const double q_lo = 0.5 * alpha * lo * lo + beta * lo;
  const double q_hi = 0.5 * alpha * hi * hi + beta * hi;
  return q_hi < q_lo ? hi : lo;
}

BlockSolveResult solve_block_subproblem(const BlockProblem& problem, int t, const BlockVector& z_mixed,
                                        const Eigen::VectorXd& p, double c, double lambda_t, BlockMethod method,
                                        const FistaParams& fista, const Eigen::VectorXd* w_mixed) {
  if (lambda_t <= 0) throw std::invalid_argument("solve_block_subproblem: lambda must be positive");
  problem.require_in_domain(z_mixed);
  const int nt = problem.dims()[t];
  const auto quad = problem.smooth().quadratic_coeff(t);

  if (method == BlockMethod::Exact1D && nt != 1)
    throw std::invalid_argument("solve_block_subproblem: exact path needs a one-dimensional block");
  const bool exact = method == BlockMethod::Exact1D || (method == BlockMethod::Auto && nt == 1 && quad.has_value());

  // Steps at the representation floor mean the block is converged to
  // machine precision; snapping them to an exact fixed point keeps the
  // residuals and the adaptive acceptance test out of roundoff noise.
  const auto snap_tol = [&](const Eigen::Ref<const Eigen::VectorXd>& z_t) {
    return 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + z_t.norm());
  };

  BlockSolveResult res;
  if (exact) {
    if (!quad) throw std::invalid_argument("solve_block_subproblem: no closed-form curvature for this block");
    const double z_t = z_mixed.block(t)[0];
    const Eigen::VectorXd w = w_mixed ? *w_mixed : problem.residual(z_mixed);
    Eigen::VectorXd g(1);
    problem.smooth().grad_block(t, z_mixed, g);
    const double grad_at_base = lambda_t * (g[0] + problem.constraint_block(t).col(0).dot(p + c * w));
    const double alpha = lambda_t * (*quad + c * problem.block_op_norm_sq(t)) + 1.0;
    const double beta = grad_at_base - alpha * z_t;
    const auto& box = problem.box(t);
    double z_plus = exact_1d_box_quadratic(alpha, beta, box.lo[0], box.hi[0]);
    if (std::abs(z_plus - z_t) <= snap_tol(z_mixed.block(t))) z_plus = z_t;
    res.ok = true;
    res.exact = true;
    res.z_plus = Eigen::VectorXd::Constant(1, z_plus);
    res.r = Eigen::VectorXd::Zero(1);
    // 0 = psi'(z_plus) + cone: the interior vertex has psi' = 0 identically,
    // a clamped solution leaves -psi'(bound) in the normal cone.
    const bool active = z_plus <= box.lo[0] || z_plus >= box.hi[0];
    res.cone = Eigen::VectorXd::Constant(1, active ? -(alpha * z_plus + beta) : 0.0);
    res.eps = 0.0;
    return res;
  }

  BlockSubproblemOracle oracle(problem, t, z_mixed, p, c, lambda_t, w_mixed);
  CompositeSubproblem sub{&oracle, problem.box(t)};
  const double m0 = std::max(fista.m0, lambda_t * c * problem.block_op_norm_sq(t));
  FistaOutcome outcome =
      adap_fista(sub, z_mixed.block(t), m0, fista.mu0, fista.sigma, fista.chi, fista.beta, fista.iter_cap);
  res.inner_status = outcome.status;
  res.inner_iterations = outcome.iterations;
  res.backtracks = outcome.backtracks;
  if (outcome.status != FistaStatus::Success) return res;
  res.ok = true;
  res.z_plus = std::move(outcome.y);
  res.r = std::move(outcome.u);
  res.cone = std::move(outcome.cone);
  res.eps = 0.0;
  if ((res.z_plus - z_mixed.block(t)).norm() <= snap_tol(z_mixed.block(t))) {
    res.z_plus = z_mixed.block(t);
    res.r.setZero();
    const auto& box = problem.box(t);
    for (int j = 0; j < res.cone.size(); ++j)
      if (res.z_plus[j] > box.lo[j] && res.z_plus[j] < box.hi[j]) res.cone[j] = 0.0;
  }
  return res;
}

Eigen::VectorXd compute_block_residual(const BlockProblem& problem, int t, const BlockVector& z,
                                       const BlockVector& z_plus, const Eigen::VectorXd& r_t, double lambda_t,
                                       double c) {
  const int B = problem.blocks();
  BlockVector mixed = z;
  for (int s = 0; s <= t; ++s) mixed.block(s) = z_plus.block(s);
  Eigen::VectorXd g_new(problem.dims()[t]), g_mixed(problem.dims()[t]);
  problem.smooth().grad_block(t, z_plus, g_new);
  problem.smooth().grad_block(t, mixed, g_mixed);
  Eigen::VectorXd tail = Eigen::VectorXd::Zero(problem.constraint_rows());
  for (int s = t + 1; s < B; ++s) tail.noalias() += problem.constraint_block(s) * (z_plus.block(s) - z.block(s));
  Eigen::VectorXd v = g_new - g_mixed + r_t / lambda_t;
  v.noalias() += c * (problem.constraint_block(t).transpose() * tail);
  v -= (z_plus.block(t) - z.block(t)) / lambda_t;
  return v;
}

namespace {

SweepOutput run_sweep(const SweepInput& input, const BlockProblem& problem, const SweepOptions& options) {
  const int B = problem.blocks();
  if (input.lambda.size() != B) throw std::invalid_argument("sweep: lambda size mismatch");
  if ((input.lambda.array() <= 0).any()) throw std::invalid_argument("sweep: lambda must be positive");
  if (input.c <= 0) throw std::invalid_argument("sweep: penalty must be positive");
  problem.require_in_domain(input.z);

  SweepOutput out;
  out.per_block.resize(B);
  out.lambda_plus = input.lambda;

  BlockVector mix = input.z;
  Eigen::VectorXd w_cur = problem.residual(mix);
  double cur_l = problem.smooth().value(mix) + input.p.dot(w_cur) + 0.5 * input.c * w_cur.squaredNorm();
  out.al_before = cur_l;

  std::vector<Eigen::VectorXd> cone_accepted(B);
  BlockVector z_plus = input.z;

  for (int t = 0; t < B; ++t) {
    BlockSweepStats& stats = out.per_block[t];
    double lam = input.lambda[t];
    while (true) {
      BlockSolveResult solve =
          solve_block_subproblem(problem, t, mix, input.p, input.c, lam, BlockMethod::Auto, options.fista, &w_cur);
      stats.inner_iterations += solve.inner_iterations;
      stats.backtracks += solve.backtracks;
      if (!solve.ok) {
        if (!options.adaptive)
          throw SweepError("inner solver failed on block " + std::to_string(t) + " with constant stepsizes");
        ++stats.halvings_inner;
        lam *= 0.5;
        if (lam < options.lambda_floor)
          throw SweepError("prox stepsize for block " + std::to_string(t) + " fell below the floor");
        continue;
      }

      const Eigen::VectorXd step = solve.z_plus - mix.block(t);
      Eigen::VectorXd a_step = problem.constraint_block(t) * step;
      // L_c(prev) - L_c(cand) in difference form: every term scales with the
      // step, so the acceptance test stays meaningful when the candidate is
      // close to the incumbent against a large objective.
      const double decrease = problem.smooth().value_decrease(t, mix, solve.z_plus) - input.p.dot(a_step) -
                              input.c * w_cur.dot(a_step) - 0.5 * input.c * a_step.squaredNorm();
      const double rhs = step.squaredNorm() / (8.0 * lam) + 0.25 * input.c * a_step.squaredNorm();

      if (options.adaptive && !(decrease >= rhs)) {
        ++stats.halvings_test;
        lam *= 0.5;
        if (lam < options.lambda_floor)
          throw SweepError("prox stepsize for block " + std::to_string(t) + " fell below the floor");
        continue;
      }
      Eigen::VectorXd w_cand = w_cur + a_step;
      mix.block(t) = solve.z_plus;
      const double cand_l = cur_l - decrease;

      stats.lambda_accepted = lam;
      stats.exact = solve.exact;
      stats.r_norm = solve.r.norm();
      stats.eps = solve.eps;
      stats.step_norm = step.norm();
      stats.al_decrease = decrease;
      stats.accept_rhs = rhs;
      out.lambda_plus[t] = lam;
      cone_accepted[t] = std::move(solve.cone);
      out.delta_plus += solve.eps / lam;
      z_plus.block(t) = mix.block(t);
      w_cur = std::move(w_cand);
      cur_l = cand_l;
      out.al_decrease += decrease;
      break;
    }
    if (options.trace) {
      BlockTraceRecord rec;
      rec.t = t;
      rec.lambda = out.lambda_plus[t];
      rec.halvings = stats.halvings_test + stats.halvings_inner;
      rec.inner_iterations = stats.inner_iterations;
      rec.step_norm = stats.step_norm;
      options.trace(rec);
    }
  }
  out.al_after = cur_l;

  if (options.check_level >= 2) {
    const double scratch = eval_al(problem, z_plus, input.p, input.c);
    if (std::abs(cur_l - scratch) > 1e-8 * (1.0 + std::abs(scratch)))
      throw SweepError("incremental augmented Lagrangian drifted from the scratch value");
  }

  // Residual pair for (z_plus, p), assembled through the inclusion it
  // certifies: v_t = grad_t f(z+) + A_t^T [p + c(Az+ - b)] + cone_t/lambda_t.
  // This equals the Gauss-Seidel expansion of compute_block_residual in
  // exact arithmetic but recomposes exactly against the dual term, so the
  // certificate stays verifiable when c is large.
  const Eigen::VectorXd dual = input.p + input.c * w_cur;
  BlockVector v(problem.dims());
  for (int t = 0; t < B; ++t) {
    Eigen::VectorXd vt(problem.dims()[t]);
    problem.smooth().grad_block(t, z_plus, vt);
    vt.noalias() += problem.constraint_block(t).transpose() * dual;
    vt += cone_accepted[t] / out.lambda_plus[t];
    v.block(t) = vt;
  }
  out.v_plus = std::move(v);
  out.z_plus = std::move(z_plus);

  if (options.check_level >= 2) {
    // Inclusion of the residual pair, checked through the worst-case
    // eps-subdifferential gap.
    const BlockVector grad = problem.smooth_gradient(out.z_plus);
    const Eigen::VectorXd dual = input.p + input.c * w_cur;
    double gap = 0.0, g_norm_sq = 0.0;
    for (int t = 0; t < B; ++t) {
      const Eigen::VectorXd g =
          out.v_plus.block(t) - grad.block(t) - problem.constraint_block(t).transpose() * dual;
      g_norm_sq += g.squaredNorm();
      gap += eps_subdiff_gap(g, out.z_plus.block(t), problem.box(t));
    }
    if (gap > out.delta_plus + 1e-9 * (1.0 + std::sqrt(g_norm_sq)))
      throw SweepError("residual-pair inclusion violated beyond tolerance");

    if (!options.adaptive && options.constants != nullptr) {
      const double bound = (options.constants->zeta1 + input.c * options.constants->zeta2) * out.al_decrease;
      const double lhs = out.v_plus.squared_norm() + out.delta_plus;
      if (lhs > bound + 1e-8 * (1.0 + bound)) throw SweepError("residual bound violated in constant-stepsize sweep");
    }
  }
  return out;
}

}  // namespace

SweepOutput bipp_sweep(const SweepInput& input, const BlockProblem& problem, const SweepOptions& options) {
  SweepOptions fixed = options;
  fixed.adaptive = false;
  return run_sweep(input, problem, fixed);
}

SweepOutput abipp_sweep(const SweepInput& input, const BlockProblem& problem, const SweepOptions& options) {
  SweepOptions adaptive = options;
  adaptive.adaptive = true;
  return run_sweep(input, problem, adaptive);
}

}  // namespace admm
