#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "admm/instance_gen.hpp"
#include "admm/solver.hpp"

namespace admm {

struct VariantSpec {
  Variant variant = Variant::Admm;
  StepsizeMode mode = StepsizeMode::Adaptive;
};

std::string to_string(const VariantSpec& v);
VariantSpec variant_from_string(const std::string& name);
// All six variants in canonical order.
std::vector<VariantSpec> all_variants();

struct BenchCell {
  Family family = Family::Dqp;
  double omega = 0.0;
  int B = 0, nbar = 0, l = 0;
};

struct BenchConfig {
  std::vector<BenchCell> cells;
  std::vector<std::uint64_t> seeds;
  std::vector<VariantSpec> variants;
  double rho = 1e-5;
  double eta = 1e-5;
  bool relative = true;
  long iter_cap = 500000;
  std::string out_dir;
  int parallelism = 1;
  bool trace = false;
  int check_level = 1;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

BenchConfig bench_config_from_json(const nlohmann::json& j);
BenchConfig load_bench_config(const std::string& path);
void validate(const BenchConfig& config);

struct BenchRow {
  BenchCell cell;
  std::uint64_t seed = 0;
  VariantSpec variant;
  RunStatus status = RunStatus::Error;
  long iters = 0;
  long mults = 0;
  double time_s = 0.0;
  double objective = 0.0;
  double penalty_final = 0.0;
  std::string error;
};

// One row per (instance, variant); all variants of a cell/seed pair consume
// the same generated instance. Row order is the (cell, seed, variant) loop
// order regardless of the parallelism degree; timing is the only
// nondeterministic column.
std::vector<BenchRow> run_benchmark(const BenchConfig& config);

SolverConfig solver_config_for(const BenchConfig& config, const VariantSpec& variant);

std::string rows_to_csv(const std::vector<BenchRow>& rows);
std::vector<BenchRow> rows_from_csv(const std::string& csv);
// Text tables grouped by (family, omega); capped rows render as "*".
std::string rows_to_table(const std::vector<BenchRow>& rows);
nlohmann::json rows_to_json(const std::vector<BenchRow>& rows);

// Writes results.csv, results.txt and results.json under config.out_dir.
// Returns the paths written.
std::vector<std::string> emit_outputs(const std::vector<BenchRow>& rows, const BenchConfig& config);

}  // namespace admm
