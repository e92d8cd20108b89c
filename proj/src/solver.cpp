#include "admm/solver.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace admm {
namespace {

// Compensated accumulator: the multiplier test divides T by the iteration
// count, and drift over 1e5 additions would perturb update timing.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

Eigen::VectorXd resolve_lambda0(const BlockProblem& problem, const SolverConfig& config) {
  if (config.lambda0) {
    if (config.lambda0->size() != problem.blocks())
      throw std::invalid_argument("solver: lambda0 size does not match block count");
    if ((config.lambda0->array() <= 0).any()) throw std::invalid_argument("solver: lambda0 must be positive");
    return *config.lambda0;
  }
  if (config.stepsize_mode == StepsizeMode::Adaptive)
    return Eigen::VectorXd::Constant(problem.blocks(), config.adaptive_lambda0);
  if (!problem.weak_convexity())
    throw std::invalid_argument("solver: constant stepsizes need weak-convexity metadata");
  const Eigen::VectorXd& m = *problem.weak_convexity();
  Eigen::VectorXd lambda(problem.blocks());
  for (int t = 0; t < problem.blocks(); ++t) lambda[t] = 1.0 / (2.0 * std::max(m[t], 1.0));
  return lambda;
}

}  // namespace

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Admm: return "admm";
    case Variant::PenaltyOnly: return "penalty";
    case Variant::VanillaAdmm: return "vadmm";
  }
  return "?";
}

const char* to_string(StepsizeMode m) { return m == StepsizeMode::Adaptive ? "adapt" : "const"; }

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::IterCap: return "itercap";
    case RunStatus::Error: return "error";
  }
  return "?";
}

bool multiplier_update_due(double stat_sq, double C, double rho, double alpha, long k, double T, long i) {
  return stat_sq <= C * C && rho * rho / (alpha * double(k + 1)) >= T / double(i);
}

ResolvedTolerances resolve_tolerances(const BlockProblem& problem, const BlockVector& x0, const SolverConfig& config) {
  if (config.rho <= 0 || config.eta <= 0) throw std::invalid_argument("solver: tolerances must be positive");
  ResolvedTolerances r;
  const double grad0 = problem.smooth_gradient(x0).norm();
  const double feas0 = problem.residual(x0).norm();
  if (config.termination == ToleranceMode::Relative) r.scales = {1.0 + grad0, 1.0 + feas0};
  r.rho_eff = config.rho * r.scales.s_v;
  r.eta_eff = config.eta * r.scales.s_feas;
  r.C_eff = config.C.value_or(1e3 * config.rho * (1.0 + grad0));
  r.alpha_eff = config.alpha.value_or(std::max(1.0, double(problem.blocks())) * r.rho_eff * r.rho_eff);
  if (r.C_eff < r.rho_eff) throw std::invalid_argument("solver: C must be at least the residual threshold");
  if (r.alpha_eff < r.rho_eff * r.rho_eff)
    throw std::invalid_argument("solver: alpha must be at least the squared residual threshold");
  return r;
}

SAdmmResult s_admm(const BlockVector& y0, const Eigen::VectorXd& q0, const Eigen::VectorXd& lambda0, double c,
                   const BlockProblem& problem, const SolverConfig& config,
                   std::optional<ResolvedTolerances> resolved, long budget, const SolverTraceFn& trace,
                   long trace_offset, long mults_offset) {
  if (c <= 0) throw std::invalid_argument("s_admm: penalty must be positive");
  problem.require_in_domain(y0);
  const ResolvedTolerances tol = resolved ? *resolved : resolve_tolerances(problem, y0, config);
  const double rho_sq = tol.rho_eff * tol.rho_eff;
  if (budget < 0) budget = config.iter_cap;

  SweepOptions sweep_opts;
  sweep_opts.adaptive = config.stepsize_mode == StepsizeMode::Adaptive;
  sweep_opts.lambda_floor = config.lambda_floor;
  sweep_opts.fista = config.fista;
  sweep_opts.check_level = config.check_level;
  sweep_opts.constants = config.constants;

  SAdmmResult res;
  res.y = y0;
  res.q = q0;
  res.lambda = lambda0;

  KahanSum T;
  long k = 0;

  auto apply_update = [&](long i, const Eigen::VectorXd& w) {
    MultiplierUpdate up;
    up.iteration = i;
    up.q_prev = res.q;
    up.residual = w;
    up.y_flat = res.y.flat();
    up.c = c;
    res.q += c * w;
    up.q_next = res.q;
    ++k;
    if (config.multiplier_bound && res.q.norm() > *config.multiplier_bound * (1.0 + 1e-9))
      throw SweepError("multiplier norm exceeded the supplied bound");
    if (res.updates.size() < kMaxStoredUpdates) res.updates.push_back(std::move(up));
  };

  for (long i = 1; i <= budget; ++i) {
    SweepInput input{res.y, res.q, res.lambda, c};
    SweepOutput sweep =
        sweep_opts.adaptive ? abipp_sweep(input, problem, sweep_opts) : bipp_sweep(input, problem, sweep_opts);
    res.y = std::move(sweep.z_plus);
    res.v = std::move(sweep.v_plus);
    res.delta = sweep.delta_plus;
    res.lambda = std::move(sweep.lambda_plus);
    res.constraint_residual = problem.residual(res.y);
    res.iters = i;

    const double stat_sq = res.v.squared_norm() + res.delta;
    const bool stop = stat_sq <= rho_sq;

    switch (config.variant) {
      case Variant::Admm:
        if (stop) {
          apply_update(i, res.constraint_residual);
        } else {
          T.add(sweep.al_decrease);
          if (multiplier_update_due(stat_sq, tol.C_eff, tol.rho_eff, tol.alpha_eff, k, T.value(), i))
            apply_update(i, res.constraint_residual);
        }
        break;
      case Variant::PenaltyOnly:
        break;
      case Variant::VanillaAdmm:
        apply_update(i, res.constraint_residual);
        break;
    }

    if (trace) {
      SweepTraceRecord rec;
      rec.i = trace_offset + i;
      rec.k = mults_offset + k;
      rec.c = c;
      rec.stat_sq = stat_sq;
      rec.feas = res.constraint_residual.norm();
      rec.T = T.value();
      rec.lambda = &res.lambda;
      trace(rec);
    }

    if (stop) {
      res.converged = true;
      break;
    }
  }
  res.mults = k;
  res.T_final = T.value();
  return res;
}

RunRecord run_variant(Variant variant, const BlockVector& x0, const Eigen::VectorXd& gamma0,
                      const BlockProblem& problem, SolverConfig config, const SolverTraceFn& trace) {
  config.variant = variant;
  problem.require_in_domain(x0);
  const ResolvedTolerances tol = resolve_tolerances(problem, x0, config);
  Eigen::VectorXd lambda = gamma0.size() > 0 ? gamma0 : resolve_lambda0(problem, config);
  if (lambda.size() != problem.blocks()) throw std::invalid_argument("run_variant: gamma0 size mismatch");
  if ((lambda.array() <= 0).any()) throw std::invalid_argument("run_variant: gamma0 must be positive");

  RunRecord rec;
  const auto t_start = std::chrono::steady_clock::now();

  BlockVector x = x0;
  Eigen::VectorXd p = Eigen::VectorXd::Zero(problem.constraint_rows());
  const double feas0 = problem.residual(x0).norm();
  double c = 1.0 / (1.0 + feas0);
  double c_used = c;

  SAdmmResult inner;
  try {
    while (true) {
      const long budget = config.iter_cap - rec.iters;
      if (budget <= 0) {
        rec.status = RunStatus::IterCap;
        break;
      }
      inner = s_admm(x, p, lambda, c, problem, config, tol, budget, trace, rec.iters, rec.mults);
      rec.iters += inner.iters;
      rec.mults += inner.mults;
      x = inner.y;
      p = inner.q;
      lambda = inner.lambda;
      c_used = c;
      c *= 2.0;
      const double feas = inner.constraint_residual.norm();
      rec.outer.push_back({c_used, inner.iters, feas});
      if (!inner.converged) {
        rec.status = RunStatus::IterCap;
        break;
      }
      if (feas <= tol.eta_eff) {
        rec.status = RunStatus::Converged;
        break;
      }
    }
  } catch (const std::exception& e) {
    rec.status = RunStatus::Error;
    rec.error = e.what();
  }

  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  rec.penalty_final = c;

  if (inner.iters > 0 || rec.status == RunStatus::Converged) {
    // PenaltyOnly never feeds a multiplier back; its reported dual candidate
    // is q0 + c (A y - b) for the last penalty actually used.
    Eigen::VectorXd p_hat =
        variant == Variant::PenaltyOnly ? Eigen::VectorXd(c_used * inner.constraint_residual) : inner.q;
    rec.certificate = StationaryCertificate::make(problem, inner.y, std::move(p_hat), inner.v, inner.delta);
    rec.objective = problem.smooth().value(inner.y);
  } else if (rec.status != RunStatus::Error) {
    rec.certificate = StationaryCertificate::make(problem, x0, p, problem.zero_point(), 0.0);
    rec.objective = problem.smooth().value(x0);
  }
  return rec;
}

AAdmmOutput a_admm(const BlockVector& x0, const Eigen::VectorXd& gamma0, const BlockProblem& problem,
                   const SolverConfig& config, const SolverTraceFn& trace) {
  RunRecord rec = run_variant(Variant::Admm, x0, gamma0, problem, config, trace);
  AAdmmOutput out;
  out.x_hat = rec.certificate.x_hat;
  out.p_hat = rec.certificate.p_hat;
  out.v_hat = rec.certificate.v_hat;
  out.eps_hat = rec.certificate.eps_hat;
  out.c_hat = rec.penalty_final;
  out.record = std::move(rec);
  return out;
}

}  // namespace admm
