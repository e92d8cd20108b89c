#include "admm/block_problem.hpp"

#include <cmath>

#include "admm/rng.hpp"

namespace admm {

BlockProblem::BlockProblem(std::vector<int> dims, std::shared_ptr<const SmoothOracle> smooth,
                           std::vector<Eigen::MatrixXd> constraint_blocks, Eigen::VectorXd rhs,
                           std::vector<BoxIndicator> boxes, std::optional<Eigen::VectorXd> weak_convexity,
                           std::optional<Eigen::VectorXd> cross_block_lipschitz)
    : dims_(std::move(dims)),
      smooth_(std::move(smooth)),
      a_(std::move(constraint_blocks)),
      b_(std::move(rhs)),
      boxes_(std::move(boxes)),
      m_(std::move(weak_convexity)),
      l_gt_(std::move(cross_block_lipschitz)) {
  const int B = blocks();
  if (B == 0) throw std::invalid_argument("BlockProblem: needs at least one block");
  if (static_cast<int>(a_.size()) != B || static_cast<int>(boxes_.size()) != B)
    throw std::invalid_argument("BlockProblem: per-block field count mismatch");
  if (!smooth_) throw std::invalid_argument("BlockProblem: missing smooth oracle");
  l_ = static_cast<int>(b_.size());
  for (int t = 0; t < B; ++t) {
    n_ += dims_[t];
    if (a_[t].rows() != l_ || a_[t].cols() != dims_[t])
      throw std::invalid_argument("BlockProblem: constraint block shape mismatch");
    if (boxes_[t].dim() != dims_[t]) throw std::invalid_argument("BlockProblem: box dimension mismatch");
  }
  if (m_ && m_->size() != B) throw std::invalid_argument("BlockProblem: weak-convexity vector size mismatch");
  if (m_ && (m_->array() < 0).any()) throw std::invalid_argument("BlockProblem: weak-convexity entries must be >= 0");
  if (l_gt_ && l_gt_->size() != B - 1)
    throw std::invalid_argument("BlockProblem: cross-block Lipschitz vector must have B-1 entries");
  a_norm_.resize(B);
  for (int t = 0; t < B; ++t) a_norm_[t] = spectral_norm(a_[t]);
}

Eigen::VectorXd BlockProblem::residual(const BlockVector& y) const {
  Eigen::VectorXd w = -b_;
  for (int t = 0; t < blocks(); ++t) w.noalias() += a_[t] * y.block(t);
  return w;
}

BlockVector BlockProblem::adjoint_apply(const Eigen::VectorXd& p) const {
  BlockVector out(dims_);
  for (int t = 0; t < blocks(); ++t) out.block(t).noalias() = a_[t].transpose() * p;
  return out;
}

bool BlockProblem::in_domain(const BlockVector& y, double tol) const {
  for (int t = 0; t < blocks(); ++t)
    if (!boxes_[t].contains(y.block(t), tol)) return false;
  return true;
}

void BlockProblem::require_in_domain(const BlockVector& y) const {
  for (int t = 0; t < blocks(); ++t)
    if (!boxes_[t].contains(y.block(t)))
      throw std::domain_error("point violates the box domain in block " + std::to_string(t));
}

BlockVector BlockProblem::smooth_gradient(const BlockVector& y) const {
  BlockVector g(dims_);
  for (int t = 0; t < blocks(); ++t) {
    Eigen::VectorXd gt(dims_[t]);
    smooth_->grad_block(t, y, gt);
    g.block(t) = gt;
  }
  return g;
}

double eval_al(const BlockProblem& problem, const BlockVector& y, const Eigen::VectorXd& p, double c) {
  if (c <= 0) throw std::invalid_argument("eval_al: penalty must be positive");
  problem.require_in_domain(y);
  const Eigen::VectorXd w = problem.residual(y);
  return problem.smooth().value(y) + p.dot(w) + 0.5 * c * w.squaredNorm();
}

std::pair<double, Eigen::VectorXd> eval_smooth_al_grad(const BlockProblem& problem, int t, const BlockVector& y,
                                                       const Eigen::VectorXd& p, double c) {
  if (t < 0 || t >= problem.blocks()) throw std::invalid_argument("eval_smooth_al_grad: invalid block index");
  problem.require_in_domain(y);
  const Eigen::VectorXd w = problem.residual(y);
  const double value = problem.smooth().value(y) + p.dot(w) + 0.5 * c * w.squaredNorm();
  Eigen::VectorXd grad(problem.dims()[t]);
  problem.smooth().grad_block(t, y, grad);
  grad.noalias() += problem.constraint_block(t).transpose() * (p + c * w);
  return {value, grad};
}

double eps_subdiff_gap(const Eigen::Ref<const Eigen::VectorXd>& g, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const BoxIndicator& box) {
  if (g.size() != x.size() || x.size() != box.lo.size())
    throw std::invalid_argument("eps_subdiff_gap: size mismatch");
  if (!box.contains(x)) throw std::domain_error("eps_subdiff_gap: point outside the box");
  double gap = 0.0;
  for (int j = 0; j < x.size(); ++j) gap += g[j] > 0 ? g[j] * (box.hi[j] - x[j]) : g[j] * (box.lo[j] - x[j]);
  return gap;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const int n = static_cast<int>(m.cols());
  if (n == 1) return m.col(0).norm();
  if (m.rows() == 1) return m.row(0).norm();
  // Fixed-seed start vector keeps the iteration deterministic while making
  // exact orthogonality to the dominant eigenvector a measure-zero event.
  Rng rng(0x5eedbeefULL);
  Eigen::VectorXd v = rng.normal_vector(n);
  v.normalize();
  double lambda = 0.0;
  constexpr int kMaxIters = 10000;
  constexpr double kRelTol = 1e-10;
  for (int it = 0; it < kMaxIters; ++it) {
    Eigen::VectorXd gv = m.transpose() * (m * v);
    const double norm = gv.norm();
    if (norm == 0.0) return 0.0;
    v = gv / norm;
    const double next = v.dot(m.transpose() * (m * v));
    if (std::abs(next - lambda) <= kRelTol * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace admm
