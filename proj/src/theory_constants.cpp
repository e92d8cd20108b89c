#include "admm/theory_constants.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace admm {
namespace {

Eigen::MatrixXd stacked_constraint(const BlockProblem& problem) {
  Eigen::MatrixXd a(problem.constraint_rows(), problem.dim());
  int col = 0;
  for (int t = 0; t < problem.blocks(); ++t) {
    a.middleCols(col, problem.dims()[t]) = problem.constraint_block(t);
    col += problem.dims()[t];
  }
  return a;
}

// Evaluates a statistic over every box corner. ||grad f(.)|| is convex for
// quadratic f, so its corner max is exact there; objective extrema over
// corners are a heuristic for general f.
void for_each_corner(const BlockProblem& problem, int dim_cap, const std::function<void(const BlockVector&)>& fn) {
  const int n = problem.dim();
  if (n > dim_cap) throw std::invalid_argument("corner enumeration limited to small dimensions");
  Eigen::VectorXd lo(n), hi(n);
  int off = 0;
  for (int t = 0; t < problem.blocks(); ++t) {
    lo.segment(off, problem.dims()[t]) = problem.box(t).lo;
    hi.segment(off, problem.dims()[t]) = problem.box(t).hi;
    off += problem.dims()[t];
  }
  BlockVector x(problem.dims());
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    for (int j = 0; j < n; ++j) x.flat()[j] = (mask >> j) & 1 ? hi[j] : lo[j];
    fn(x);
  }
}

}  // namespace

double smallest_positive_singular_value(const BlockProblem& problem) {
  const Eigen::MatrixXd a = stacked_constraint(problem);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0) return 0.0;
  const double cutoff = 1e-10 * sv[0];
  double smallest = 0.0;
  for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i) {
    if (sv[i] > cutoff) {
      smallest = sv[i];
      break;
    }
  }
  return smallest;
}

TheoryConstants compute_theory_constants(const BlockProblem& problem, const std::optional<SlaterData>& slater,
                                         std::optional<double> C, int corner_dim_cap, bool objective_range) {
  if (!problem.weak_convexity())
    throw std::invalid_argument("compute_theory_constants: problem lacks weak-convexity metadata");
  const Eigen::VectorXd& m = *problem.weak_convexity();
  const int B = problem.blocks();

  TheoryConstants out;
  double a_sq = 0.0;
  for (int t = 0; t < B; ++t) a_sq += problem.block_op_norm_sq(t);
  out.a_dagger_norm = std::sqrt(a_sq);
  out.zeta2 = 24.0 * (B - 1) * a_sq;

  if (problem.cross_block_lipschitz()) {
    out.L = problem.cross_block_lipschitz()->norm();
  } else {
    out.L = 0.0;
    out.L_is_lower_estimate = B > 1;
  }
  out.zeta1 = 100.0 * std::max(1.0, m.maxCoeff()) + 24.0 * out.L * out.L + 1.0;

  if (C) {
    if (!slater) throw std::invalid_argument("compute_theory_constants: upsilon needs Slater data");
    if (slater->d_bar <= 0) throw std::invalid_argument("compute_theory_constants: Slater distance must be positive");
    problem.require_in_domain(slater->x_bar);
    // D_h = sup over the box of the distance to x_bar; separable, so exact.
    double dh_sq = 0.0;
    for (int t = 0; t < B; ++t) {
      const auto& box = problem.box(t);
      const auto xt = slater->x_bar.block(t);
      for (int j = 0; j < box.dim(); ++j) {
        const double d = std::max(std::abs(box.lo[j] - xt[j]), std::abs(box.hi[j] - xt[j]));
        dh_sq += d * d;
      }
    }
    out.D_h = std::sqrt(dh_sq);
    double grad_sup = 0.0;
    for_each_corner(problem, corner_dim_cap,
                    [&](const BlockVector& x) { grad_sup = std::max(grad_sup, problem.smooth_gradient(x).norm()); });
    out.nabla_f_sup = grad_sup;
    out.nu_plus_A = smallest_positive_singular_value(problem);
    if (*out.nu_plus_A <= 0) throw std::invalid_argument("compute_theory_constants: constraint operator is zero");
    const double mh = 0.0;  // box indicator restricted to its domain
    out.upsilon_C = (2.0 * *out.D_h * mh + (2.0 * *out.D_h + 1.0) * (*C + *C * *C + *out.nabla_f_sup)) /
                    (slater->d_bar * *out.nu_plus_A);
  }
  if (objective_range) {
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    for_each_corner(problem, corner_dim_cap, [&](const BlockVector& x) {
      const double v = problem.smooth().value(x);
      sup = std::max(sup, v);
      inf = std::min(inf, v);
    });
    out.phi_sup = sup;
    out.phi_inf = inf;
  }
  return out;
}

}  // namespace admm
