#pragma once

#include <stdexcept>

#include <Eigen/Core>

namespace admm {

// Box indicator nonsmooth term. This is the only prox-friendly term shipped;
// other separable convex terms would slot in behind the same three calls
// (prox, membership, eps-subdifferential gap). On its domain the indicator
// is identically zero, so its Lipschitz constant M_h is 0.
struct BoxIndicator {
  Eigen::VectorXd lo, hi;

  BoxIndicator() = default;
  BoxIndicator(Eigen::VectorXd lo_, Eigen::VectorXd hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("BoxIndicator: bound size mismatch");
    if ((lo.array() > hi.array()).any()) throw std::invalid_argument("BoxIndicator: lo > hi");
  }

  static BoxIndicator centered(int n, double half_width) {
    return BoxIndicator(Eigen::VectorXd::Constant(n, -half_width), Eigen::VectorXd::Constant(n, half_width));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 0.0) const {
    return (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
  }

  // Prox of the indicator: componentwise clamp, independent of the step.
  Eigen::VectorXd prox(const Eigen::Ref<const Eigen::VectorXd>& v, double /*step*/ = 1.0) const {
    return v.cwiseMax(lo).cwiseMin(hi);
  }
};

// sup_{z in box} <g, z - x>. Nonnegative for x in the box; g lies in the
// eps-subdifferential of the box indicator at x iff the gap is <= eps.
double eps_subdiff_gap(const Eigen::Ref<const Eigen::VectorXd>& g, const Eigen::Ref<const Eigen::VectorXd>& x,
                       const BoxIndicator& box);

}  // namespace admm
