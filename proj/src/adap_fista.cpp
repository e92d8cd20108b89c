#include "admm/adap_fista.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace admm {
namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("adap_fista: non-finite ") + what);
}

}  // namespace

std::pair<double, Eigen::VectorXd> fista_momentum_step(double accum_A, double tau, const Eigen::VectorXd& y,
                                                       const Eigen::VectorXd& x, double mu0, double M_next) {
  if (M_next <= mu0) throw std::invalid_argument("fista_momentum_step: requires M > mu0");
  if (accum_A < 0 || tau < 0) throw std::invalid_argument("fista_momentum_step: negative accumulators");
  const double gap = M_next - mu0;
  const double a = (tau + std::sqrt(tau * tau + 4.0 * tau * accum_A * gap)) / (2.0 * gap);
  // Anchored form of (A y + a x)/(A + a): exact when the points coincide and
  // when A = 0, where the plain average perturbs x by an ulp and can push a
  // boundary start outside its box.
  Eigen::VectorXd x_tilde = y + (a / (accum_A + a)) * (x - y);
  return {a, std::move(x_tilde)};
}

FistaOutcome adap_fista(const CompositeSubproblem& sub, const Eigen::VectorXd& x0, double M0, double mu0, double sigma,
                        double chi, double beta, long iter_cap, const FistaTraceFn& trace) {
  if (sub.smooth == nullptr) throw std::invalid_argument("adap_fista: missing smooth oracle");
  if (!(M0 > mu0) || !(mu0 > 0)) throw std::invalid_argument("adap_fista: requires M0 > mu0 > 0");
  if (!(sigma > 0) || !(chi > 0) || !(chi < 1) || !(beta > 1))
    throw std::invalid_argument("adap_fista: invalid (sigma, chi, beta)");
  if (!sub.box.contains(x0)) throw std::domain_error("adap_fista: x0 outside the domain");

  const double sqrt_sigma = std::sqrt(sigma);
  const int d = static_cast<int>(x0.size());

  Eigen::VectorXd x = x0, y = x0;
  double accum_A = 0.0, tau = 1.0, M = M0;

  FistaOutcome out;
  Eigen::VectorXd grad_tilde(d), grad_y(d), x_tilde(d), y_next(d), u(d), cone(d);

  for (long j = 0; j < iter_cap; ++j) {
    out.iterations = j + 1;

    // Step 2: prox-gradient step from the extrapolated point, doubling M by
    // beta until the descent estimate holds.
    double a = 0.0;
    while (true) {
      auto [aj, xt] = fista_momentum_step(accum_A, tau, y, x, mu0, M);
      a = aj;
      x_tilde = std::move(xt);
      sub.smooth->gradient(x_tilde, grad_tilde);
      y_next = sub.box.prox(x_tilde - grad_tilde / M);
      const Eigen::VectorXd step = y_next - x_tilde;
      const double gap = sub.smooth->value_gap(x_tilde, y_next);
      require_finite(gap, "value");
      if (grad_tilde.dot(step) + 0.5 * (1.0 - chi) * M * step.squaredNorm() >= gap) break;
      M *= beta;
      ++out.backtracks;
    }

    // Step 3: accumulator updates.
    const double accum_next = accum_A + a;
    const double tau_next = tau + a * mu0;
    const Eigen::VectorXd s = (M - mu0) * (x_tilde - y_next);
    x = (mu0 * a * y_next + tau * x - a * s) / tau_next;

    // Step 4: strong-convexity probe; a hard inequality with no slack.
    const double dist_sq = (y_next - x0).squaredNorm();
    const double step_sq = (y_next - x_tilde).squaredNorm();
    if (!(dist_sq >= chi * accum_next * M * step_sq)) {
      out.status = FistaStatus::Failure;
      out.y = y_next;
      out.final_M = M;
      return out;
    }

    // Step 5: residual u = grad psi_s(y) + cone with cone the normal-cone
    // element certified by the prox step. Coordinates the clamp left alone
    // have a zero cone component identically; writing that zero instead of
    // the cancelling M (x~ - y) - g~ keeps the inclusion exact at any
    // curvature scale.
    sub.smooth->gradient(y_next, grad_y);
    cone.setZero();
    for (int i = 0; i < d; ++i) {
      if (y_next[i] <= sub.box.lo[i] || y_next[i] >= sub.box.hi[i])
        cone[i] = M * (x_tilde[i] - y_next[i]) - grad_tilde[i];
    }
    u = grad_y + cone;
    require_finite(u.norm(), "gradient");
    // Attainable floor of ||u||: the residual is assembled from quantities
    // of size M (1 + |x~|) and |grad|, so below this level the relative test
    // compares roundoff against roundoff and can never pass from a
    // near-stationary start.
    const double u_floor =
        8.0 * std::numeric_limits<double>::epsilon() * (M * (1.0 + x_tilde.norm()) + grad_tilde.norm());

    if (trace) {
      FistaIterRecord rec;
      rec.j = j;
      rec.M = M;
      rec.step_norm = std::sqrt(step_sq);
      rec.u_norm = u.norm();
      rec.y = &y_next;
      rec.x_tilde = &x_tilde;
      rec.u = &u;
      trace(rec);
    }

    if (u.norm() <= sqrt_sigma * std::sqrt(dist_sq) + u_floor) {
      out.status = FistaStatus::Success;
      out.y = y_next;
      out.u = u;
      out.cone = cone;
      out.final_M = M;
      return out;
    }

    accum_A = accum_next;
    tau = tau_next;
    y = y_next;
  }

  out.status = FistaStatus::IterationCap;
  out.y = y;
  out.u = u;
  out.final_M = M;
  return out;
}

}  // namespace admm
