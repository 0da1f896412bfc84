#include "maisac/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "maisac/serialization.hpp"

namespace maisac {

namespace {

struct Cell {
  Method method = Method::kFpa;
  double value = 0.0;
  double secondary = 0.0;
  int n_tx = 0;
  int n_rx = 0;
  std::uint64_t seed = 0;
};

ScenarioConfig cell_config(const SweepSpec& spec, const Cell& c) {
  ScenarioConfig cfg = spec.base_config;
  cfg.n_tx = c.n_tx;
  cfg.n_rx = c.n_rx;
  cfg.seed = c.seed;
  switch (spec.study) {
    case Study::kPower:
      cfg.power_budget = c.value;
      break;
    case Study::kRange:
      cfg.tx_range[1] = cfg.tx_range[0] + c.value;
      cfg.rx_range[1] = cfg.rx_range[0] + c.secondary;
      break;
    case Study::kWeights:
      cfg.weight_comm = c.value;
      cfg.weight_sense = 1.0 - c.value;
      cfg.array_separation = c.secondary;
      break;
  }
  return cfg;
}

std::string sanitize_csv(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

RunRecord run_cell(const SweepSpec& spec, const Cell& c) {
  RunRecord rec;
  rec.study = study_name(spec.study);
  rec.method = method_name(c.method);
  rec.swept_value = c.value;
  rec.secondary_value = c.secondary;
  rec.n_tx = c.n_tx;
  rec.n_rx = c.n_rx;
  rec.seed = c.seed;
  try {
    const ScenarioConfig cfg = cell_config(spec, c);
    cfg.validate();
    const Scenario scen = sample_scenario(cfg);
    rec.scenario_hash = scenario_hash(scen);

    const auto t0 = std::chrono::steady_clock::now();
    IsacSolution sol;
    switch (c.method) {
      case Method::kFpa:
        sol = fpa_solve(scen, cfg, spec.position.solver);
        break;
      case Method::kGama:
        sol = ga_ma_optimize(scen, cfg, spec.position);
        break;
      case Method::kCfgs:
        sol = cfgs_optimize(scen, cfg, spec.position);
        break;
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.objective = sol.objective_value;
    rec.comm_sum_rate = sol.comm_sum_rate;
    rec.sensing_mi = sol.sensing_mi;
    rec.converged = sol.converged;

    if (!spec.trace_dir.empty()) {
      std::filesystem::create_directories(spec.trace_dir);
      const std::string name = rec.study + "_" + rec.method + "_v" +
                               format_double(c.value) + "_s" +
                               format_double(c.secondary) + "_a" +
                               std::to_string(c.n_tx) + "x" +
                               std::to_string(c.n_rx) + "_seed" +
                               std::to_string(c.seed) + ".csv";
      write_text_file((std::filesystem::path(spec.trace_dir) / name).string(),
                      position_trace_to_csv(sol.trace));
    }
  } catch (const std::exception& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

int resolved_threads() {
  if (const char* env = std::getenv("MAISAC_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<RunRecord> run_sweep(const SweepSpec& spec) {
  spec.validate();

  std::vector<double> secondary = spec.secondary_values;
  if (secondary.empty()) {
    switch (spec.study) {
      case Study::kPower:
        secondary = {0.0};  // unused axis
        break;
      case Study::kRange:
        secondary = {spec.base_config.rx_range[1] - spec.base_config.rx_range[0]};
        break;
      case Study::kWeights:
        secondary = {spec.base_config.array_separation};
        break;
    }
  }
  std::vector<std::pair<int, int>> antennas = spec.antenna_configs;
  if (antennas.empty())
    antennas = {{spec.base_config.n_tx, spec.base_config.n_rx}};

  // Canonical cell order; the output inherits it regardless of scheduling.
  std::vector<Cell> cells;
  for (const double value : spec.grid)
    for (const double sec : secondary)
      for (const auto& [n_tx, n_rx] : antennas)
        for (int s = 0; s < spec.n_seeds; ++s)
          for (const Method m : spec.methods)
            cells.push_back({m, value, sec, n_tx, n_rx,
                             spec.seed0 + static_cast<std::uint64_t>(s)});

  std::vector<RunRecord> records(cells.size());
  const int n_threads =
      std::min<int>(resolved_threads(), static_cast<int>(cells.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      records[i] = run_cell(spec, cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < cells.size();
           i = next.fetch_add(1))
        records[i] = run_cell(spec, cells[i]);
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return records;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (const double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1)) /
         std::sqrt(static_cast<double>(n));
}

}  // namespace

std::string study_name(Study s) {
  switch (s) {
    case Study::kPower: return "power";
    case Study::kRange: return "range";
    case Study::kWeights: return "weights";
  }
  return "unknown";
}

std::string method_name(Method m) {
  switch (m) {
    case Method::kFpa: return "fpa";
    case Method::kGama: return "gama";
    case Method::kCfgs: return "cfgs";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "fpa") return Method::kFpa;
  if (name == "gama") return Method::kGama;
  if (name == "cfgs") return Method::kCfgs;
  throw std::invalid_argument("unknown method: " + name);
}

void SweepSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("SweepSpec: grid must be non-empty");
  if (n_seeds < 1) throw std::invalid_argument("SweepSpec: n_seeds must be >= 1");
  if (methods.empty())
    throw std::invalid_argument("SweepSpec: methods must be non-empty");
  base_config.validate();
  position.validate(base_config);
  for (const auto& [n_tx, n_rx] : antenna_configs)
    if (n_tx < 1 || n_rx < 1)
      throw std::invalid_argument("SweepSpec: antenna counts must be >= 1");
}

std::vector<RunRecord> run_power_sweep(const SweepSpec& spec) {
  if (spec.study != Study::kPower)
    throw std::invalid_argument("run_power_sweep: spec.study must be power");
  return run_sweep(spec);
}

std::vector<RunRecord> run_range_sweep(const SweepSpec& spec) {
  if (spec.study != Study::kRange)
    throw std::invalid_argument("run_range_sweep: spec.study must be range");
  return run_sweep(spec);
}

std::vector<RunRecord> run_weight_sweep(const SweepSpec& spec) {
  if (spec.study != Study::kWeights)
    throw std::invalid_argument("run_weight_sweep: spec.study must be weights");
  return run_sweep(spec);
}

void emit_results(const std::vector<RunRecord>& records,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  std::vector<RunRecord> rows = records;
  const auto key = [](const RunRecord& r) {
    return std::make_tuple(r.study, r.method, r.swept_value, r.secondary_value,
                           r.n_tx, r.n_rx, r.seed);
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const RunRecord& a, const RunRecord& b) {
                     return key(a) < key(b);
                   });

  std::string results =
      "study,method,swept_value,secondary_value,n_tx,n_rx,seed,"
      "scenario_hash,objective,comm_sum_rate,sensing_mi,converged,failed,error\n";
  std::string timings =
      "study,method,swept_value,secondary_value,n_tx,n_rx,seed,wall_time\n";
  for (const RunRecord& r : rows) {
    const std::string prefix = r.study + ',' + r.method + ',' +
                               format_double(r.swept_value) + ',' +
                               format_double(r.secondary_value) + ',' +
                               std::to_string(r.n_tx) + ',' +
                               std::to_string(r.n_rx) + ',' +
                               std::to_string(r.seed);
    results += prefix + ',' + std::to_string(r.scenario_hash) + ',' +
               format_double(r.objective) + ',' +
               format_double(r.comm_sum_rate) + ',' +
               format_double(r.sensing_mi) + ',' +
               (r.converged ? "1" : "0") + ',' + (r.failed ? "1" : "0") + ',' +
               sanitize_csv(r.error) + '\n';
    timings += prefix + ',' + format_double(r.wall_time) + '\n';
  }
  write_text_file((fs::path(out_dir) / "results.csv").string(), results);
  write_text_file((fs::path(out_dir) / "timings.csv").string(), timings);

  // Per-cell-group statistics over seeds; failed runs are counted but do not
  // contribute to the moments.
  using GroupKey = std::tuple<std::string, std::string, double, double, int, int>;
  struct Agg {
    int n_runs = 0;
    int n_failed = 0;
    std::vector<double> obj, comm, sense;
  };
  std::map<GroupKey, Agg> groups;
  for (const RunRecord& r : rows) {
    Agg& g = groups[{r.study, r.method, r.swept_value, r.secondary_value,
                     r.n_tx, r.n_rx}];
    ++g.n_runs;
    if (r.failed) {
      ++g.n_failed;
      continue;
    }
    g.obj.push_back(r.objective);
    g.comm.push_back(r.comm_sum_rate);
    g.sense.push_back(r.sensing_mi);
  }
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& [k, g] : groups) {
    nlohmann::json cell;
    cell["study"] = std::get<0>(k);
    cell["method"] = std::get<1>(k);
    cell["swept_value"] = std::get<2>(k);
    cell["secondary_value"] = std::get<3>(k);
    cell["n_tx"] = std::get<4>(k);
    cell["n_rx"] = std::get<5>(k);
    cell["n_runs"] = g.n_runs;
    cell["n_failed"] = g.n_failed;
    cell["objective_mean"] = mean_of(g.obj);
    cell["objective_stderr"] = stderr_of(g.obj);
    cell["comm_sum_rate_mean"] = mean_of(g.comm);
    cell["comm_sum_rate_stderr"] = stderr_of(g.comm);
    cell["sensing_mi_mean"] = mean_of(g.sense);
    cell["sensing_mi_stderr"] = stderr_of(g.sense);
    summary.push_back(cell);
  }
  write_text_file((fs::path(out_dir) / "summary.json").string(),
                  summary.dump(2) + "\n");
}

bool any_failed(const std::vector<RunRecord>& records) {
  for (const RunRecord& r : records)
    if (r.failed) return true;
  return false;
}

}  // namespace maisac
