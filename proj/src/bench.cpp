#include "admm/bench.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "admm/serialization.hpp"

namespace admm {

using nlohmann::json;

std::string to_string(const VariantSpec& v) {
  return std::string(to_string(v.variant)) + "-" + to_string(v.mode);
}

VariantSpec variant_from_string(const std::string& name) {
  for (const VariantSpec& v : all_variants())
    if (to_string(v) == name) return v;
  throw ConfigError("unknown variant: " + name);
}

std::vector<VariantSpec> all_variants() {
  std::vector<VariantSpec> out;
  for (Variant v : {Variant::Admm, Variant::PenaltyOnly, Variant::VanillaAdmm})
    for (StepsizeMode m : {StepsizeMode::Adaptive, StepsizeMode::Constant}) out.push_back({v, m});
  return out;
}

void validate(const BenchConfig& config) {
  if (config.cells.empty()) throw ConfigError("bench config: empty grid");
  if (config.seeds.empty()) throw ConfigError("bench config: no seeds");
  if (config.variants.empty()) throw ConfigError("bench config: no variants selected");
  if (config.iter_cap < 1) throw ConfigError("bench config: iter_cap must be >= 1");
  if (config.rho <= 0 || config.eta <= 0) throw ConfigError("bench config: tolerances must be positive");
  if (config.parallelism < 1) throw ConfigError("bench config: parallelism must be >= 1");
  for (const BenchCell& cell : config.cells) {
    if (cell.B < 1 || cell.nbar < 1 || cell.l < 1 || cell.omega <= 0) throw ConfigError("bench config: bad cell sizes");
    if (cell.family == Family::Qpbc && cell.nbar != 1) throw ConfigError("bench config: qpbc cells need nbar = 1");
  }
}

BenchConfig bench_config_from_json(const json& j) {
  BenchConfig config;
  for (const auto& cell : j.at("cells")) {
    BenchCell c;
    c.family = family_from_string(cell.at("family").get<std::string>());
    c.omega = cell.at("omega").get<double>();
    c.B = cell.at("B").get<int>();
    c.nbar = cell.value("nbar", c.family == Family::Qpbc ? 1 : 0);
    c.l = cell.at("l").get<int>();
    config.cells.push_back(c);
  }
  for (const auto& s : j.at("seeds")) config.seeds.push_back(s.get<std::uint64_t>());
  if (j.contains("variants")) {
    for (const auto& v : j.at("variants")) config.variants.push_back(variant_from_string(v.get<std::string>()));
  } else {
    config.variants = all_variants();
  }
  config.rho = j.value("rho", config.rho);
  config.eta = j.value("eta", config.eta);
  config.relative = j.value("relative", config.relative);
  config.iter_cap = j.value("iter_cap", config.iter_cap);
  config.out_dir = j.value("out_dir", config.out_dir);
  config.parallelism = j.value("parallelism", config.parallelism);
  config.trace = j.value("trace", config.trace);
  config.check_level = j.value("check_level", config.check_level);
  validate(config);
  return config;
}

BenchConfig load_bench_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return bench_config_from_json(j);
}

SolverConfig solver_config_for(const BenchConfig& config, const VariantSpec& variant) {
  SolverConfig sc;
  sc.rho = config.rho;
  sc.eta = config.eta;
  sc.termination = config.relative ? ToleranceMode::Relative : ToleranceMode::Absolute;
  sc.stepsize_mode = variant.mode;
  sc.variant = variant.variant;
  sc.iter_cap = config.iter_cap;
  sc.check_level = config.check_level;
  return sc;
}

namespace {

BenchRow run_row(const BenchConfig& config, const GeneratedInstance& instance, const VariantSpec& variant,
                 std::uint64_t seed) {
  BenchRow row;
  row.cell = {instance.spec.family, instance.spec.omega, instance.spec.B, instance.spec.nbar, instance.spec.l};
  row.seed = seed;
  row.variant = variant;
  try {
    const SolverConfig sc = solver_config_for(config, variant);
    SolverTraceFn trace;
    std::ofstream trace_out;
    if (config.trace && !config.out_dir.empty()) {
      std::ostringstream name;
      name << config.out_dir << "/trace-" << to_string(instance.spec.family) << "-w" << instance.spec.omega << "-"
           << instance.spec.B << "x" << instance.spec.nbar << "x" << instance.spec.l << "-s" << seed << "-"
           << to_string(variant) << ".jsonl";
      trace_out.open(name.str());
      trace = [&trace_out](const SweepTraceRecord& rec) {
        json line;
        line["i"] = rec.i;
        line["k"] = rec.k;
        line["c"] = rec.c;
        line["stat_sq"] = rec.stat_sq;
        line["feas"] = rec.feas;
        line["T"] = rec.T;
        json lam = json::array();
        for (int t = 0; t < rec.lambda->size(); ++t) lam.push_back((*rec.lambda)[t]);
        line["lambda"] = lam;
        trace_out << line.dump() << "\n";
      };
    }
    const RunRecord rec =
        run_variant(variant.variant, instance.x0, Eigen::VectorXd(), instance.problem, sc, trace);
    row.status = rec.status;
    row.iters = rec.iters;
    row.mults = rec.mults;
    row.time_s = rec.wall_time_s;
    row.objective = rec.objective;
    row.penalty_final = rec.penalty_final;
    row.error = rec.error;
  } catch (const std::exception& e) {
    row.status = RunStatus::Error;
    row.error = e.what();
  }
  return row;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<BenchRow> run_benchmark(const BenchConfig& config) {
  validate(config);

  struct Task {
    std::size_t instance_idx;
    VariantSpec variant;
    std::uint64_t seed;
  };
  std::vector<GeneratedInstance> instances;
  std::vector<Task> tasks;
  for (const BenchCell& cell : config.cells) {
    for (std::uint64_t seed : config.seeds) {
      InstanceSpec spec{cell.family, seed, cell.B, cell.nbar, cell.l, cell.omega};
      instances.push_back(generate_instance(spec));
      for (const VariantSpec& variant : config.variants) tasks.push_back({instances.size() - 1, variant, seed});
    }
  }

  std::vector<BenchRow> rows(tasks.size());
  if (config.parallelism <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      rows[i] = run_row(config, instances[tasks[i].instance_idx], tasks[i].variant, tasks[i].seed);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) break;
        rows[i] = run_row(config, instances[tasks[i].instance_idx], tasks[i].variant, tasks[i].seed);
      }
    };
    std::vector<std::future<void>> pool;
    for (int w = 0; w < config.parallelism; ++w) pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }
  return rows;
}

std::string rows_to_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "# admm-bench-rows/1\n";
  out << "family,omega,B,nbar,l,seed,variant,status,iters,mults,time_s,objective,penalty_final\n";
  for (const BenchRow& r : rows) {
    char time_buf[32];
    std::snprintf(time_buf, sizeof(time_buf), "%.3f", r.time_s);
    out << to_string(r.cell.family) << ',' << format_double(r.cell.omega) << ',' << r.cell.B << ',' << r.cell.nbar
        << ',' << r.cell.l << ',' << r.seed << ',' << to_string(r.variant) << ',' << to_string(r.status) << ','
        << r.iters << ',' << r.mults << ',' << time_buf << ',' << format_double(r.objective) << ','
        << format_double(r.penalty_final) << '\n';
  }
  return out.str();
}

std::vector<BenchRow> rows_from_csv(const std::string& csv) {
  std::vector<BenchRow> rows;
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 13) throw std::invalid_argument("rows_from_csv: malformed row: " + line);
    BenchRow r;
    r.cell.family = family_from_string(fields[0]);
    r.cell.omega = std::stod(fields[1]);
    r.cell.B = std::stoi(fields[2]);
    r.cell.nbar = std::stoi(fields[3]);
    r.cell.l = std::stoi(fields[4]);
    r.seed = std::stoull(fields[5]);
    r.variant = variant_from_string(fields[6]);
    if (fields[7] == "converged")
      r.status = RunStatus::Converged;
    else if (fields[7] == "itercap")
      r.status = RunStatus::IterCap;
    else
      r.status = RunStatus::Error;
    r.iters = std::stol(fields[8]);
    r.mults = std::stol(fields[9]);
    r.time_s = std::stod(fields[10]);
    r.objective = std::stod(fields[11]);
    r.penalty_final = std::stod(fields[12]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string rows_to_table(const std::vector<BenchRow>& rows) {
  // Group rows by (family, omega); one line per (B, nbar, l, seed) with the
  // variants side by side, capped runs shown as "*".
  std::map<std::pair<std::string, double>, std::vector<const BenchRow*>> groups;
  std::vector<std::string> variant_order;
  for (const BenchRow& r : rows) {
    groups[{to_string(r.cell.family), r.cell.omega}].push_back(&r);
    const std::string v = to_string(r.variant);
    bool seen = false;
    for (const auto& known : variant_order) seen = seen || known == v;
    if (!seen) variant_order.push_back(v);
  }

  std::ostringstream out;
  for (const auto& [key, group] : groups) {
    out << "family=" << key.first << "  omega=" << key.second << "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-18s %-6s", "(B,nbar,l)", "seed");
    out << buf;
    for (const auto& v : variant_order) {
      std::snprintf(buf, sizeof(buf), " | %-28s", v.c_str());
      out << buf;
    }
    out << "\n";
    std::map<std::tuple<int, int, int, std::uint64_t>, std::map<std::string, const BenchRow*>> lines;
    for (const BenchRow* r : group)
      lines[{r->cell.B, r->cell.nbar, r->cell.l, r->seed}][to_string(r->variant)] = r;
    for (const auto& [lk, cols] : lines) {
      std::snprintf(buf, sizeof(buf), "(%d,%d,%d)", std::get<0>(lk), std::get<1>(lk), std::get<2>(lk));
      char head[160];
      std::snprintf(head, sizeof(head), "%-18s %-6llu", buf, static_cast<unsigned long long>(std::get<3>(lk)));
      out << head;
      for (const auto& v : variant_order) {
        auto it = cols.find(v);
        if (it == cols.end()) {
          std::snprintf(buf, sizeof(buf), " | %-28s", "-");
        } else if (it->second->status == RunStatus::Converged) {
          char cell[96];
          std::snprintf(cell, sizeof(cell), "%ld/%ld %.3f %.3e", it->second->iters, it->second->mults,
                        it->second->time_s, it->second->objective);
          std::snprintf(buf, sizeof(buf), " | %-28s", cell);
        } else if (it->second->status == RunStatus::IterCap) {
          std::snprintf(buf, sizeof(buf), " | %-28s", "*");
        } else {
          std::snprintf(buf, sizeof(buf), " | %-28s", "error");
        }
        out << buf;
      }
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

json rows_to_json(const std::vector<BenchRow>& rows) {
  json out;
  out["schema"] = "admm-bench-rows/1";
  json arr = json::array();
  for (const BenchRow& r : rows) {
    json j;
    j["family"] = to_string(r.cell.family);
    j["omega"] = r.cell.omega;
    j["B"] = r.cell.B;
    j["nbar"] = r.cell.nbar;
    j["l"] = r.cell.l;
    j["seed"] = r.seed;
    j["variant"] = to_string(r.variant);
    j["status"] = to_string(r.status);
    j["iters"] = r.iters;
    j["mults"] = r.mults;
    j["time_s"] = r.time_s;
    j["objective"] = r.objective;
    j["penalty_final"] = r.penalty_final;
    if (!r.error.empty()) j["error"] = r.error;
    arr.push_back(std::move(j));
  }
  out["rows"] = std::move(arr);
  return out;
}

std::vector<std::string> emit_outputs(const std::vector<BenchRow>& rows, const BenchConfig& config) {
  if (rows.empty()) throw ConfigError("emit_outputs: no rows");
  const std::string dir = config.out_dir.empty() ? "." : config.out_dir;
  std::filesystem::create_directories(dir);
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_outputs: cannot write " + path);
    out << content;
    written.push_back(path);
  };
  write("results.csv", rows_to_csv(rows));
  write("results.txt", rows_to_table(rows));
  write("results.json", rows_to_json(rows).dump(1) + "\n");
  return written;
}

}  // namespace admm
