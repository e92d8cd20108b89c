#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "admm/block_ipp.hpp"
#include "admm/block_problem.hpp"
#include "admm/stationarity.hpp"

namespace admm {

enum class Variant { Admm, PenaltyOnly, VanillaAdmm };
enum class StepsizeMode { Constant, Adaptive };
enum class RunStatus { Converged, IterCap, Error };

const char* to_string(Variant v);
const char* to_string(StepsizeMode m);
const char* to_string(RunStatus s);

struct SolverConfig {
  double rho = 1e-5;
  double eta = 1e-5;
  ToleranceMode termination = ToleranceMode::Relative;

  // Multiplier-update gate C and epoch weight alpha. Left empty they default
  // to C = 1e3 * rho * (1 + ||grad f(x0)||) and alpha = max(rho_eff^2,
  // B * rho_eff^2), with rho_eff the residual threshold after relative
  // scaling. Explicit values must satisfy C >= rho_eff and alpha >= rho_eff^2.
  std::optional<double> C;
  std::optional<double> alpha;

  StepsizeMode stepsize_mode = StepsizeMode::Adaptive;
  // Initial prox stepsizes. Empty: constant mode uses 1/(2 max{m_t, 1}) from
  // the problem's weak-convexity metadata, adaptive mode uses
  // adaptive_lambda0 for every block.
  std::optional<Eigen::VectorXd> lambda0;
  double adaptive_lambda0 = 100.0;

  FistaParams fista;
  Variant variant = Variant::Admm;
  long iter_cap = 500000;
  double lambda_floor = 1e-12;
  int check_level = 1;

  // Optional diagnostics: multiplier-norm bound (asserted at every update
  // when set) and theory constants for per-sweep residual bound checks.
  std::optional<double> multiplier_bound;
  const TheoryConstants* constants = nullptr;
};

struct SweepTraceRecord {
  long i = 0;  // global sweep index across the run
  long k = 0;  // multiplier updates so far
  double c = 0.0;
  double stat_sq = 0.0;  // ||v||^2 + delta
  double feas = 0.0;
  double T = 0.0;
  const Eigen::VectorXd* lambda = nullptr;
};
using SolverTraceFn = std::function<void(const SweepTraceRecord&)>;

struct MultiplierUpdate {
  long iteration = 0;  // j_k within the inner call
  Eigen::VectorXd q_prev;
  Eigen::VectorXd q_next;
  Eigen::VectorXd residual;  // A y - b at the update
  Eigen::VectorXd y_flat;    // iterate at the update, flattened
  double c = 0.0;
};

// The update log is capped; mults keeps the true count (the vanilla variant
// updates every sweep).
inline constexpr std::size_t kMaxStoredUpdates = 1000;

struct SAdmmResult {
  bool converged = false;  // the residual test fired (vs. budget exhaustion)
  BlockVector y;
  Eigen::VectorXd q;
  BlockVector v;
  double delta = 0.0;
  Eigen::VectorXd lambda;
  Eigen::VectorXd constraint_residual;
  long iters = 0;
  long mults = 0;
  std::vector<MultiplierUpdate> updates;
  double T_final = 0.0;
};

// Epoch gate for the Lagrange-multiplier update: fires iff
// ||v||^2 + delta <= C^2 and rho^2 / (alpha (k+1)) >= T / i.
bool multiplier_update_due(double stat_sq, double C, double rho, double alpha, long k, double T, long i);

// Effective thresholds after relative scaling.
struct ResolvedTolerances {
  double rho_eff = 0.0;
  double eta_eff = 0.0;
  double C_eff = 0.0;
  double alpha_eff = 0.0;
  RelativeScales scales;
};
ResolvedTolerances resolve_tolerances(const BlockProblem& problem, const BlockVector& x0, const SolverConfig& config);

// Fixed-penalty driver: sweeps until ||v^i||^2 + delta_i <= rho_eff^2, with
// epoch-gated multiplier updates driven by the potential T (variant Admm),
// no updates at all (PenaltyOnly) or an update every sweep (VanillaAdmm).
// `budget` < 0 means config.iter_cap. `trace_offset` shifts the global sweep
// index reported to the trace sink.
SAdmmResult s_admm(const BlockVector& y0, const Eigen::VectorXd& q0, const Eigen::VectorXd& lambda0, double c,
                   const BlockProblem& problem, const SolverConfig& config,
                   std::optional<ResolvedTolerances> resolved = std::nullopt, long budget = -1,
                   const SolverTraceFn& trace = {}, long trace_offset = 0, long mults_offset = 0);

struct OuterRecord {
  double c_used = 0.0;
  long iters = 0;
  double feas = 0.0;
};

struct RunRecord {
  RunStatus status = RunStatus::Error;
  long iters = 0;
  long mults = 0;
  double wall_time_s = 0.0;
  double objective = 0.0;
  StationaryCertificate certificate;
  double penalty_final = 0.0;  // c after the final doubling, c0 * 2^(outer calls)
  std::vector<OuterRecord> outer;
  std::string error;
};

// Outer penalty-doubling shell shared by all variants: p = 0 and
// c0 = 1/(1 + ||A x0 - b||), each outer iteration warm-starts the inner
// driver from the previous output and doubles c, stopping once
// ||A x - b|| <= eta_eff. Solver failures are captured in the record.
RunRecord run_variant(Variant variant, const BlockVector& x0, const Eigen::VectorXd& gamma0,
                      const BlockProblem& problem, SolverConfig config, const SolverTraceFn& trace = {});

struct AAdmmOutput {
  BlockVector x_hat;
  Eigen::VectorXd p_hat;
  BlockVector v_hat;
  double eps_hat = 0.0;
  double c_hat = 0.0;
  RunRecord record;
};

AAdmmOutput a_admm(const BlockVector& x0, const Eigen::VectorXd& gamma0, const BlockProblem& problem,
                   const SolverConfig& config, const SolverTraceFn& trace = {});

}  // namespace admm
