#pragma once

#include <functional>
#include <utility>

#include <Eigen/Core>

#include "admm/box.hpp"

namespace admm {

// Smooth part of a composite subproblem min psi_s(u) + psi_n(u) over R^d.
class SubproblemOracle {
 public:
  virtual ~SubproblemOracle() = default;
  virtual double value(const Eigen::VectorXd& u) const = 0;
  virtual void gradient(const Eigen::VectorXd& u, Eigen::Ref<Eigen::VectorXd> out) const = 0;

  // psi_s(to) - psi_s(from). The curvature line search compares this against
  // step-scaled quantities; the default subtraction of two full values hits
  // the roundoff floor of |psi_s| when the two points are close, so oracles
  // with structure should override it with a difference form.
  virtual double value_gap(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const {
    return value(to) - value(from);
  }
};

// Composite subproblem with a (scaled) box indicator as the nonsmooth part;
// the scaling is irrelevant since the indicator's prox is a plain clamp.
struct CompositeSubproblem {
  const SubproblemOracle* smooth = nullptr;
  BoxIndicator box;
};

enum class FistaStatus {
  Success,       // (y, u, 0) certifies a (sigma; x0)-stationary solution
  Failure,       // the step-4 inequality was violated: the smooth part is
                 // not mu0-strongly convex
  IterationCap,  // budget exhausted; distinct from Failure
};

struct FistaOutcome {
  FistaStatus status = FistaStatus::IterationCap;
  Eigen::VectorXd y;
  Eigen::VectorXd u;
  // Normal-cone certificate: u = grad psi_s(y) + cone, with exact zeros at
  // coordinates the final prox step left unclamped.
  Eigen::VectorXd cone;
  long iterations = 0;
  long backtracks = 0;
  double final_M = 0.0;
};

struct FistaParams {
  double m0 = 1.0;
  double beta = 1.2;
  double mu0 = 0.5;
  double chi = 0.001;
  // Bound of the target certificate ||u||^2 <= sigma ||y - x0||^2; the
  // success test compares ||u|| against sqrt(sigma) ||y - x0||.
  double sigma = 0.125;
  long iter_cap = 100000;
};

// Per-iteration record for the optional trace sink.
struct FistaIterRecord {
  long j = 0;
  double M = 0.0;
  double step_norm = 0.0;  // ||y_{j+1} - x_tilde_j||
  double u_norm = 0.0;
  const Eigen::VectorXd* y = nullptr;
  const Eigen::VectorXd* x_tilde = nullptr;
  const Eigen::VectorXd* u = nullptr;
};
using FistaTraceFn = std::function<void(const FistaIterRecord&)>;

// Momentum coefficient and extrapolation point:
//   a = [tau + sqrt(tau^2 + 4 tau A (M - mu0))] / [2 (M - mu0)],
//   x_tilde = (A y + a x) / (A + a).
std::pair<double, Eigen::VectorXd> fista_momentum_step(double accum_A, double tau, const Eigen::VectorXd& y,
                                                       const Eigen::VectorXd& x, double mu0, double M_next);

// Accelerated proximal gradient method with curvature backtracking and a
// strong-convexity probe. On Success the output pair satisfies
// ||u|| <= sqrt(sigma) ||y - x0|| together with the exact inclusion
// u in grad psi_s(y) + partial psi_n(y). Failure means the smooth part is
// not mu0-strongly convex; IterationCap is reported separately so callers
// can decide how conservatively to treat it.
FistaOutcome adap_fista(const CompositeSubproblem& sub, const Eigen::VectorXd& x0, double M0, double mu0, double sigma,
                        double chi, double beta, long iter_cap, const FistaTraceFn& trace = {});

inline FistaOutcome adap_fista(const CompositeSubproblem& sub, const Eigen::VectorXd& x0, const FistaParams& p,
                               const FistaTraceFn& trace = {}) {
  return adap_fista(sub, x0, p.m0, p.mu0, p.sigma, p.chi, p.beta, p.iter_cap, trace);
}

}  // namespace admm
