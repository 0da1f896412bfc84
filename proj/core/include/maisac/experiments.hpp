#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "maisac/position_opt.hpp"

namespace maisac {

enum class Study { kPower, kRange, kWeights };
enum class Method { kFpa, kGama, kCfgs };

std::string study_name(Study s);
std::string method_name(Method m);
Method parse_method(const std::string& name);  // "fpa" | "gama" | "cfgs"

/// One sweep campaign.  `grid` holds the primary swept values in solver
/// units: watts for the power study, the Tx movable-range width in meters
/// for the range study, and the communication weight for the weight study.
/// `secondary_values` is the per-study second axis (Rx range width for the
/// range study, array separation r0 for the weight study; unused for power);
/// empty means "keep the base config's value".
struct SweepSpec {
  Study study = Study::kPower;
  std::vector<double> grid;
  std::vector<double> secondary_values;
  std::vector<std::pair<int, int>> antenna_configs;  // (N_T, N_R); empty = base
  int n_seeds = 1;
  std::uint64_t seed0 = 1;  // run k uses seed seed0 + k
  ScenarioConfig base_config;
  std::vector<Method> methods{Method::kFpa, Method::kGama, Method::kCfgs};
  CfgsOptions position;
  std::string trace_dir;  // non-empty: write one trace CSV per run there

  void validate() const;
};

/// Outcome of a single (method, swept value, secondary, antennas, seed) cell.
/// wall_time is the only non-deterministic field and is therefore excluded
/// from the results table; emit_results writes it to a separate file.
struct RunRecord {
  std::string study;
  std::string method;
  double swept_value = 0.0;
  double secondary_value = 0.0;
  int n_tx = 0;
  int n_rx = 0;
  std::uint64_t seed = 0;
  std::uint64_t scenario_hash = 0;  // equal across methods at fixed seed
  double objective = 0.0;      // weight_comm * comm_sum_rate + weight_sense * sensing_mi
  double comm_sum_rate = 0.0;
  double sensing_mi = 0.0;
  double wall_time = 0.0;  // seconds
  bool converged = false;
  bool failed = false;
  std::string error;
};

/// The three studies.  Each produces one record per cell of
/// grid x secondary x antenna_configs x seeds x methods, in canonical order.
/// Scenario draws depend only on (seed, n_users, n_clutters, n_paths), so all
/// methods and swept values at a fixed seed consume the identical
/// environment.  Cells run in parallel when the MAISAC_THREADS environment
/// variable allows; results are ordered canonically regardless.  A cell that
/// throws is recorded with failed=true and the sweep continues.
std::vector<RunRecord> run_power_sweep(const SweepSpec& spec);
std::vector<RunRecord> run_range_sweep(const SweepSpec& spec);
std::vector<RunRecord> run_weight_sweep(const SweepSpec& spec);

/// Writes results.csv (deterministic bytes; no wall_time), timings.csv
/// (wall clock per cell), and summary.json (per-cell-group means and
/// standard errors over seeds) into out_dir, creating it if needed.
void emit_results(const std::vector<RunRecord>& records,
                  const std::string& out_dir);

/// True when any record carries failed=true (drives the CLI exit code).
bool any_failed(const std::vector<RunRecord>& records);

}  // namespace maisac
