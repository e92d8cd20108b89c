#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "admm/bench.hpp"
#include "admm/serialization.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("ADMM_BENCH_OUT");
  return env != nullptr ? env : "bench_out";
}

int cmd_gen(const std::string& family, double omega, int B, int nbar, int l, std::uint64_t seed,
            const std::string& output) {
  admm::InstanceSpec spec;
  spec.family = admm::family_from_string(family);
  spec.seed = seed;
  spec.B = B;
  spec.nbar = spec.family == admm::Family::Qpbc ? 1 : nbar;
  spec.l = l;
  spec.omega = omega;
  const admm::GeneratedInstance instance = admm::generate_instance(spec);
  admm::save_instance(instance, output);
  std::cout << "wrote " << output << " (n=" << instance.problem.dim() << ", l=" << instance.problem.constraint_rows()
            << ")\n";
  return 0;
}

int cmd_solve(const std::string& instance_path, const std::string& variant_name, double rho, double eta,
              bool absolute_mode, long iter_cap, int check_level, const std::string& trace_path,
              const std::string& cert_path) {
  const admm::GeneratedInstance instance = admm::load_instance(instance_path);
  const admm::VariantSpec variant = admm::variant_from_string(variant_name);

  admm::SolverConfig config;
  config.rho = rho;
  config.eta = eta;
  config.termination = absolute_mode ? admm::ToleranceMode::Absolute : admm::ToleranceMode::Relative;
  config.stepsize_mode = variant.mode;
  config.variant = variant.variant;
  config.iter_cap = iter_cap;
  config.check_level = check_level;

  std::ofstream trace_out;
  admm::SolverTraceFn trace;
  if (!trace_path.empty()) {
    trace_out.open(trace_path);
    if (!trace_out) {
      std::cerr << "cannot write trace file " << trace_path << "\n";
      return 2;
    }
    trace = [&trace_out](const admm::SweepTraceRecord& rec) {
      nlohmann::json line;
      line["i"] = rec.i;
      line["k"] = rec.k;
      line["c"] = rec.c;
      line["stat_sq"] = rec.stat_sq;
      line["feas"] = rec.feas;
      line["T"] = rec.T;
      nlohmann::json lam = nlohmann::json::array();
      for (int t = 0; t < rec.lambda->size(); ++t) lam.push_back((*rec.lambda)[t]);
      line["lambda"] = lam;
      trace_out << line.dump() << "\n";
    };
  }

  const admm::RunRecord rec =
      admm::run_variant(variant.variant, instance.x0, Eigen::VectorXd(), instance.problem, config, trace);

  std::cout << "status:        " << admm::to_string(rec.status) << "\n"
            << "iterations:    " << rec.iters << "\n"
            << "mult updates:  " << rec.mults << "\n"
            << "time:          " << rec.wall_time_s << " s\n"
            << "objective:     " << rec.objective << "\n"
            << "penalty_final: " << rec.penalty_final << "\n";
  if (rec.status == admm::RunStatus::Error) {
    std::cerr << "error: " << rec.error << "\n";
    return 1;
  }
  std::cout << "feasibility:   " << rec.certificate.feas_norm << "\n"
            << "stationarity:  " << rec.certificate.stat_norm_sq << " (||v||^2 + eps)\n";

  if (!cert_path.empty()) {
    admm::SavedCertificate saved;
    saved.certificate = rec.certificate;
    saved.rho = rho;
    saved.eta = eta;
    saved.mode = config.termination;
    saved.scales = admm::resolve_tolerances(instance.problem, instance.x0, config).scales;
    admm::save_certificate(saved, instance.problem.dims(), cert_path);
    std::cout << "wrote certificate " << cert_path << "\n";
  }
  return 0;
}

int cmd_bench(const std::string& config_path, const std::string& out_override) {
  admm::BenchConfig config;
  try {
    config = admm::load_bench_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  if (!out_override.empty()) config.out_dir = out_override;
  if (config.out_dir.empty()) config.out_dir = default_out_dir();

  const std::vector<admm::BenchRow> rows = admm::run_benchmark(config);
  for (const std::string& path : admm::emit_outputs(rows, config)) std::cout << "wrote " << path << "\n";

  bool any_error = false;
  for (const admm::BenchRow& row : rows) any_error = any_error || row.status == admm::RunStatus::Error;
  return any_error ? 1 : 0;
}

int cmd_verify(const std::string& instance_path, const std::string& cert_path) {
  const admm::GeneratedInstance instance = admm::load_instance(instance_path);
  admm::SavedCertificate saved = admm::load_certificate(cert_path);
  // Recompute the residual norms against the loaded instance.
  admm::StationaryCertificate cert =
      admm::StationaryCertificate::make(instance.problem, saved.certificate.x_hat, saved.certificate.p_hat,
                                        saved.certificate.v_hat, saved.certificate.eps_hat);
  const bool tolerances_ok = admm::check_stationarity(cert, saved.rho, saved.eta, saved.mode, saved.scales);
  const admm::InclusionGap gap = admm::certificate_inclusion_gap(instance.problem, cert);
  const bool inclusion_ok = gap.within(cert.eps_hat);

  std::cout << "stationarity  ||v||^2+eps = " << cert.stat_norm_sq << "\n"
            << "feasibility   ||Ax-b||    = " << cert.feas_norm << "\n"
            << "inclusion gap             = " << gap.gap << (inclusion_ok ? "  (ok)" : "  (VIOLATED)") << "\n"
            << "tolerances                : " << (tolerances_ok ? "satisfied" : "NOT satisfied") << "\n";
  return tolerances_ok && inclusion_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block proximal ADMM solvers and benchmark harness"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate a problem instance and write it to disk");
  std::string family = "dqp", output = "instance.json";
  double omega = 100.0;
  int B = 2, nbar = 10, l = 10;
  std::uint64_t seed = 1;
  gen->add_option("--family", family, "dqp | cauchy | qpbc")->required();
  gen->add_option("--omega", omega, "box half-width")->required();
  gen->add_option("--B", B, "block count")->required();
  gen->add_option("--nbar", nbar, "per-block dimension (ignored for qpbc)");
  gen->add_option("--l", l, "constraint rows")->required();
  gen->add_option("--seed", seed, "64-bit seed");
  gen->add_option("-o,--output", output, "output path");

  auto* solve = app.add_subcommand("solve", "Solve one instance with one variant");
  std::string instance_path, variant_name = "admm-adapt", trace_path, cert_path;
  double rho = 1e-5, eta = 1e-5;
  bool absolute_mode = false;
  long iter_cap = 500000;
  int check_level = 1;
  solve->add_option("--instance", instance_path, "instance JSON path")->required();
  solve->add_option("--variant", variant_name, "admm|penalty|vadmm x adapt|const, e.g. admm-adapt");
  solve->add_option("--rho", rho, "stationarity tolerance");
  solve->add_option("--eta", eta, "feasibility tolerance");
  solve->add_flag("--absolute", absolute_mode, "use absolute tolerances (default relative)");
  solve->add_option("--iter-cap", iter_cap, "total sweep budget");
  solve->add_option("--check-level", check_level, "runtime check level 0-2");
  solve->add_option("--trace", trace_path, "write per-sweep JSONL trace");
  solve->add_option("--cert", cert_path, "write the output certificate");

  auto* bench = app.add_subcommand("bench", "Run a benchmark grid from a config file");
  std::string config_path, out_override;
  bench->add_option("--config", config_path, "bench config JSON")->required();
  bench->add_option("-o,--out", out_override, "output directory (default $ADMM_BENCH_OUT or ./bench_out)");

  auto* verify = app.add_subcommand("verify", "Re-check a certificate against an instance file");
  std::string v_instance, v_cert;
  verify->add_option("--instance", v_instance, "instance JSON path")->required();
  verify->add_option("--cert", v_cert, "certificate JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(family, omega, B, nbar, l, seed, output);
    if (solve->parsed())
      return cmd_solve(instance_path, variant_name, rho, eta, absolute_mode, iter_cap, check_level, trace_path,
                       cert_path);
    if (bench->parsed()) return cmd_bench(config_path, out_override);
    if (verify->parsed()) return cmd_verify(v_instance, v_cert);
  } catch (const admm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
