#pragma once

#include <vector>

#include "admm/block_problem.hpp"

namespace admm {

// f(x) = sum_t (1/2) x_t' P_t x_t + <r_t, x_t>, block separable.
class BlockSeparableQuadraticOracle final : public SmoothOracle {
 public:
  BlockSeparableQuadraticOracle(std::vector<Eigen::MatrixXd> p, std::vector<Eigen::VectorXd> r)
      : p_(std::move(p)), r_(std::move(r)) {}

  double value(const BlockVector& x) const override {
    double v = 0.0;
    for (std::size_t t = 0; t < p_.size(); ++t) {
      const auto xt = x.block(static_cast<int>(t));
      v += 0.5 * xt.dot(p_[t] * xt) + r_[t].dot(xt);
    }
    return v;
  }

  void grad_block(int t, const BlockVector& x, Eigen::Ref<Eigen::VectorXd> out) const override {
    out.noalias() = p_[t] * x.block(t);
    out += r_[t];
  }

  std::optional<double> quadratic_coeff(int t) const override {
    if (p_[t].rows() != 1) return std::nullopt;
    return p_[t](0, 0);
  }

  double value_decrease(int t, const BlockVector& x, const Eigen::Ref<const Eigen::VectorXd>& u) const override {
    // (1/2) z'Pz - (1/2) u'Pu + r'(z - u) = ((1/2) P (z + u) + r)'(z - u).
    const Eigen::VectorXd z = x.block(t);
    return (0.5 * (p_[t] * (z + u)) + r_[t]).dot(z - u);
  }

  const std::vector<Eigen::MatrixXd>& p() const { return p_; }
  const std::vector<Eigen::VectorXd>& r() const { return r_; }

 private:
  std::vector<Eigen::MatrixXd> p_;
  std::vector<Eigen::VectorXd> r_;
};

// f(x) = (1/2) x' P x + <r, x> over the flat variable; blocks are slices.
class DenseQuadraticOracle final : public SmoothOracle {
 public:
  DenseQuadraticOracle(Eigen::MatrixXd p, Eigen::VectorXd r) : p_(std::move(p)), r_(std::move(r)) {}

  double value(const BlockVector& x) const override {
    return 0.5 * x.flat().dot(p_ * x.flat()) + r_.dot(x.flat());
  }

  void grad_block(int t, const BlockVector& x, Eigen::Ref<Eigen::VectorXd> out) const override {
    const int off = x.block_offset(t);
    const int nt = x.block_dim(t);
    out.noalias() = p_.middleRows(off, nt) * x.flat();
    out += r_.segment(off, nt);
  }

  std::optional<double> quadratic_coeff(int t) const override { return quad_[static_cast<std::size_t>(t)]; }

  double value_decrease(int t, const BlockVector& x, const Eigen::Ref<const Eigen::VectorXd>& u) const override {
    // Exact quadratic expansion: f(x) - f(x') = g_t(x)'d - (1/2) d'P_tt d
    // with d the block step and P_tt the diagonal block.
    const int off = x.block_offset(t);
    const int nt = x.block_dim(t);
    const Eigen::VectorXd d = x.block(t) - u;
    Eigen::VectorXd g(nt);
    grad_block(t, x, g);
    return g.dot(d) - 0.5 * d.dot(p_.block(off, off, nt, nt) * d);
  }

  // Per-block curvature is only constant when the block is one coordinate.
  void finalize_blocks(const std::vector<int>& dims) {
    quad_.clear();
    int off = 0;
    for (int d : dims) {
      quad_.push_back(d == 1 ? std::optional<double>(p_(off, off)) : std::nullopt);
      off += d;
    }
  }

  const Eigen::MatrixXd& p() const { return p_; }
  const Eigen::VectorXd& r() const { return r_; }

 private:
  Eigen::MatrixXd p_;
  Eigen::VectorXd r_;
  std::vector<std::optional<double>> quad_;
};

// f(x) = sum_t (alpha_t^2/2) log(1 + ((y_t - <x_t, z_t>)/alpha_t)^2).
class CauchyLossOracle final : public SmoothOracle {
 public:
  CauchyLossOracle(Eigen::VectorXd alpha, Eigen::VectorXd y_obs, std::vector<Eigen::VectorXd> z)
      : alpha_(std::move(alpha)), y_obs_(std::move(y_obs)), z_(std::move(z)) {}

  double value(const BlockVector& x) const override {
    double v = 0.0;
    for (std::size_t t = 0; t < z_.size(); ++t) {
      const double s = (y_obs_[t] - x.block(static_cast<int>(t)).dot(z_[t])) / alpha_[t];
      v += 0.5 * alpha_[t] * alpha_[t] * std::log1p(s * s);
    }
    return v;
  }

  void grad_block(int t, const BlockVector& x, Eigen::Ref<Eigen::VectorXd> out) const override {
    const double s = y_obs_[t] - x.block(t).dot(z_[t]);
    const double ratio = s / alpha_[t];
    out = (-s / (1.0 + ratio * ratio)) * z_[t];
  }

  double value_decrease(int t, const BlockVector& x, const Eigen::Ref<const Eigen::VectorXd>& u) const override {
    // log1p(q0) - log1p(q1) = log1p((q0 - q1)/(1 + q1)) with
    // q0 - q1 = (s0 - s1)(s0 + s1)/alpha^2 and s0 - s1 = <z_t, u - x_t>.
    const double a = alpha_[t];
    const double s0 = y_obs_[t] - x.block(t).dot(z_[t]);
    const double s1 = y_obs_[t] - u.dot(z_[t]);
    const double diff = z_[t].dot(u - x.block(t));  // s0 - s1
    return 0.5 * a * a * std::log1p(diff * (s0 + s1) / (a * a + s1 * s1));
  }

  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& y_obs() const { return y_obs_; }
  const std::vector<Eigen::VectorXd>& z() const { return z_; }

 private:
  Eigen::VectorXd alpha_;
  Eigen::VectorXd y_obs_;
  std::vector<Eigen::VectorXd> z_;
};

}  // namespace admm
