#include "admm/stationarity.hpp"

#include <cmath>
#include <stdexcept>

namespace admm {

StationaryCertificate StationaryCertificate::make(const BlockProblem& problem, BlockVector x, Eigen::VectorXd p,
                                                  BlockVector v, double eps) {
  if (eps < 0) throw std::invalid_argument("StationaryCertificate: eps must be >= 0");
  StationaryCertificate cert;
  cert.feas_norm = problem.residual(x).norm();
  cert.stat_norm_sq = v.squared_norm() + eps;
  cert.x_hat = std::move(x);
  cert.p_hat = std::move(p);
  cert.v_hat = std::move(v);
  cert.eps_hat = eps;
  return cert;
}

bool check_stationarity(const StationaryCertificate& cert, double rho, double eta, ToleranceMode mode,
                        const RelativeScales& scales) {
  if (rho <= 0 || eta <= 0) throw std::invalid_argument("check_stationarity: tolerances must be positive");
  if (mode == ToleranceMode::Relative)
    return cert.v_hat.norm() / scales.s_v <= rho && cert.feas_norm / scales.s_feas <= eta;
  return std::sqrt(cert.stat_norm_sq) <= rho && cert.feas_norm <= eta;
}

InclusionGap certificate_inclusion_gap(const BlockProblem& problem, const StationaryCertificate& cert) {
  const BlockVector grad = problem.smooth_gradient(cert.x_hat);
  const BlockVector atp = problem.adjoint_apply(cert.p_hat);
  InclusionGap out;
  double g_sq = 0.0;
  for (int t = 0; t < problem.blocks(); ++t) {
    const Eigen::VectorXd g = cert.v_hat.block(t) - grad.block(t) - atp.block(t);
    g_sq += g.squaredNorm();
    out.gap += eps_subdiff_gap(g, cert.x_hat.block(t), problem.box(t));
  }
  out.g_norm = std::sqrt(g_sq);
  return out;
}

}  // namespace admm
