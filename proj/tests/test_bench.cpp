#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "admm/bench.hpp"
#include "admm/serialization.hpp"

using namespace admm;

namespace {

BenchConfig small_config() {
  BenchConfig config;
  config.cells = {{Family::Dqp, 10.0, 2, 3, 2}};
  config.seeds = {1, 2};
  config.variants = {variant_from_string("admm-adapt"), variant_from_string("penalty-adapt")};
  config.rho = config.eta = 1e-4;
  config.relative = true;
  config.iter_cap = 20000;
  return config;
}

// Timing is the only nondeterministic column; strip it for comparisons.
std::string without_time_column(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() == 13) fields.erase(fields.begin() + 10);
    for (std::size_t i = 0; i < fields.size(); ++i) out << fields[i] << (i + 1 < fields.size() ? "," : "");
    out << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("variant names round trip") {
  CHECK(all_variants().size() == 6);
  for (const VariantSpec& v : all_variants()) CHECK(to_string(variant_from_string(to_string(v))) == to_string(v));
  CHECK_THROWS_AS(variant_from_string("bogus"), ConfigError);
}

TEST_CASE("config validation") {
  BenchConfig config = small_config();
  config.variants.clear();
  CHECK_THROWS_AS(validate(config), ConfigError);
  config = small_config();
  config.seeds.clear();
  CHECK_THROWS_AS(validate(config), ConfigError);
  config = small_config();
  config.iter_cap = 0;
  CHECK_THROWS_AS(validate(config), ConfigError);
  config = small_config();
  config.cells[0].nbar = 0;
  CHECK_THROWS_AS(validate(config), ConfigError);

  const char* json_text = R"({
    "cells": [{"family": "dqp", "omega": 10.0, "B": 2, "nbar": 3, "l": 2}],
    "seeds": [1, 2],
    "variants": ["admm-adapt", "penalty-adapt"],
    "rho": 1e-4, "eta": 1e-4, "iter_cap": 20000
  })";
  const BenchConfig parsed = bench_config_from_json(nlohmann::json::parse(json_text));
  CHECK(parsed.cells.size() == 1);
  CHECK(parsed.seeds.size() == 2);
  CHECK(parsed.variants.size() == 2);
}

TEST_CASE("row counts are instances times variants") {
  const BenchConfig config = small_config();
  const std::vector<BenchRow> rows = run_benchmark(config);
  CHECK(rows.size() == 4);  // 1 cell x 2 seeds x 2 variants
  for (const BenchRow& row : rows) CHECK(row.iters <= config.iter_cap);
}

TEST_CASE("csv round trips all non-float-formatted fields") {
  BenchConfig config = small_config();
  config.seeds = {1};
  const std::vector<BenchRow> rows = run_benchmark(config);
  const std::string csv = rows_to_csv(rows);
  const std::vector<BenchRow> parsed = rows_from_csv(csv);
  REQUIRE(parsed.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(to_string(parsed[i].cell.family) == to_string(rows[i].cell.family));
    CHECK(parsed[i].cell.B == rows[i].cell.B);
    CHECK(parsed[i].cell.nbar == rows[i].cell.nbar);
    CHECK(parsed[i].cell.l == rows[i].cell.l);
    CHECK(parsed[i].seed == rows[i].seed);
    CHECK(to_string(parsed[i].variant) == to_string(rows[i].variant));
    CHECK(to_string(parsed[i].status) == to_string(rows[i].status));
    CHECK(parsed[i].iters == rows[i].iters);
    CHECK(parsed[i].mults == rows[i].mults);
  }
}

TEST_CASE("capped rows render as a star in tables and itercap in csv") {
  BenchConfig config = small_config();
  config.seeds = {3};
  config.variants = {variant_from_string("admm-adapt")};
  config.iter_cap = 2;  // guaranteed cap
  const std::vector<BenchRow> rows = run_benchmark(config);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].status == RunStatus::IterCap);
  CHECK(rows_to_csv(rows).find(",itercap,") != std::string::npos);
  const std::string table = rows_to_table(rows);
  CHECK(table.find("*") != std::string::npos);
}

TEST_CASE("serial benchmark output is deterministic") {
  const BenchConfig config = small_config();
  const std::string a = rows_to_csv(run_benchmark(config));
  const std::string b = rows_to_csv(run_benchmark(config));
  CHECK(without_time_column(a) == without_time_column(b));
}

TEST_CASE("parallel execution preserves row order and content") {
  BenchConfig serial = small_config();
  BenchConfig parallel = small_config();
  parallel.parallelism = 4;
  const std::string a = without_time_column(rows_to_csv(run_benchmark(serial)));
  const std::string b = without_time_column(rows_to_csv(run_benchmark(parallel)));
  CHECK(a == b);
}

TEST_CASE("emit writes csv, table and json") {
  BenchConfig config = small_config();
  config.seeds = {1};
  config.out_dir = (std::filesystem::temp_directory_path() / "admm_bench_emit_test").string();
  std::filesystem::remove_all(config.out_dir);
  const std::vector<BenchRow> rows = run_benchmark(config);
  const std::vector<std::string> written = emit_outputs(rows, config);
  REQUIRE(written.size() == 3);
  for (const std::string& path : written) CHECK(std::filesystem::exists(path));
  CHECK_THROWS_AS(emit_outputs({}, config), ConfigError);
  std::filesystem::remove_all(config.out_dir);
}

TEST_CASE("converged rows re-verify from the serialized instance") {
  const BenchConfig config = small_config();
  const InstanceSpec spec{config.cells[0].family, 1, config.cells[0].B, config.cells[0].nbar, config.cells[0].l,
                          config.cells[0].omega};
  const GeneratedInstance inst = generate_instance(spec);

  const auto tmp = std::filesystem::temp_directory_path() / "admm_replay_test";
  std::filesystem::create_directories(tmp);
  const std::string inst_path = (tmp / "inst.json").string();
  save_instance(inst, inst_path);
  const GeneratedInstance replayed = load_instance(inst_path);

  const SolverConfig sc = solver_config_for(config, variant_from_string("admm-adapt"));
  const RunRecord rec = run_variant(Variant::Admm, replayed.x0, Eigen::VectorXd(), replayed.problem, sc);
  REQUIRE(rec.status == RunStatus::Converged);
  const ResolvedTolerances tol = resolve_tolerances(replayed.problem, replayed.x0, sc);
  CHECK(check_stationarity(rec.certificate, config.rho, config.eta, ToleranceMode::Relative, tol.scales));
  CHECK(certificate_inclusion_gap(replayed.problem, rec.certificate).within(rec.certificate.eps_hat));
  std::filesystem::remove_all(tmp);
}
