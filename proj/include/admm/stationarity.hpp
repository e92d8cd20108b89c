#pragma once

#include "admm/block_problem.hpp"
#include "admm/block_vector.hpp"

namespace admm {

// Candidate stationary quadruple (x, p, v, eps) together with its residual
// norms: v is the stationarity residual in the inclusion
//   v in grad f(x) + partial_eps h(x) + A* p,
// feas_norm = ||Ax - b|| and stat_norm_sq = ||v||^2 + eps.
struct StationaryCertificate {
  BlockVector x_hat;
  Eigen::VectorXd p_hat;
  BlockVector v_hat;
  double eps_hat = 0.0;
  double feas_norm = 0.0;
  double stat_norm_sq = 0.0;

  static StationaryCertificate make(const BlockProblem& problem, BlockVector x, Eigen::VectorXd p, BlockVector v,
                                    double eps);
};

// Normalisation used by the relative termination criterion: s_v scales the
// stationarity residual, s_feas the feasibility residual. Both are 1 in
// absolute mode; in relative mode s_v = 1 + ||grad f(x0)|| and
// s_feas = 1 + ||A x0 - b|| for the run's initial point x0.
struct RelativeScales {
  double s_v = 1.0;
  double s_feas = 1.0;
};

enum class ToleranceMode { Absolute, Relative };

// Absolute mode: sqrt(||v||^2 + eps) <= rho and ||Ax - b|| <= eta.
// Relative mode: ||v|| / s_v <= rho and ||Ax - b|| / s_feas <= eta.
bool check_stationarity(const StationaryCertificate& cert, double rho, double eta, ToleranceMode mode,
                        const RelativeScales& scales = {});

// Worst-case eps-subdifferential slack of the certificate's inclusion:
//   sum_t gap(g_t, x_t, box_t)  with  g = v - grad f(x) - A* p.
// The inclusion holds iff gap <= eps_hat up to roundoff; g_norm gives the
// scale for the roundoff allowance (gap <= eps + 1e-9 (1 + ||g||)).
struct InclusionGap {
  double gap = 0.0;
  double g_norm = 0.0;
  bool within(double eps) const { return gap <= eps + 1e-9 * (1.0 + g_norm); }
};
InclusionGap certificate_inclusion_gap(const BlockProblem& problem, const StationaryCertificate& cert);

}  // namespace admm
