// Experiment driver: the three sweep studies plus a single-run mode.  All
// unit conversions (dBm, wavelength multiples) happen here; the library
// speaks watts and meters only.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "maisac/experiments.hpp"
#include "maisac/serialization.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string profile = "desk";
  std::string out_dir = "results";
  int n_seeds = 20;
  std::uint64_t seed0 = 1;
  std::vector<std::string> methods{"fpa", "gama", "cfgs"};
  std::int64_t combo_cap = 2000;
  int position_iters = 100;
  std::vector<std::string> antennas;  // "NTxNR", e.g. "8x4"
  bool traces = false;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path,
                  "JSON config file; missing keys fall back to the profile");
  cmd->add_option("--profile", args->profile, "Base config: desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  cmd->add_option("--out", args->out_dir, "Output directory");
  cmd->add_option("--seeds", args->n_seeds, "Number of seeds per cell")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed0", args->seed0, "First seed");
  cmd->add_option("--methods", args->methods,
                  "Methods to run (fpa, gama, cfgs)")
      ->delimiter(',');
  cmd->add_option("--combo-cap", args->combo_cap,
                  "Coarse-search combination budget")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--position-iters", args->position_iters,
                  "Fine-phase position iteration cap")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--antennas", args->antennas,
                  "Antenna configs as NTxNR (repeatable), e.g. 8x4");
  cmd->add_flag("--traces", args->traces,
                "Write one objective-trace CSV per run under <out>/traces");
}

maisac::ScenarioConfig base_config(const CommonArgs& args) {
  const maisac::ScenarioConfig defaults =
      args.profile == "full" ? maisac::ScenarioConfig::full_profile()
                              : maisac::ScenarioConfig::desk_profile();
  if (args.config_path.empty()) return defaults;
  return maisac::load_config(args.config_path, defaults);
}

maisac::SweepSpec build_spec(maisac::Study study, const CommonArgs& args) {
  maisac::SweepSpec spec;
  spec.study = study;
  spec.base_config = base_config(args);
  spec.n_seeds = args.n_seeds;
  spec.seed0 = args.seed0;
  spec.methods.clear();
  for (const std::string& m : args.methods)
    spec.methods.push_back(maisac::parse_method(m));
  spec.position.combo_cap = args.combo_cap;
  spec.position.max_position_iters = args.position_iters;
  for (const std::string& a : args.antennas) {
    int nt = 0, nr = 0;
    if (std::sscanf(a.c_str(), "%dx%d", &nt, &nr) != 2 || nt <= 0 || nr <= 0)
      throw CLI::ValidationError("--antennas", "expected NTxNR, got '" + a + "'");
    spec.antenna_configs.emplace_back(nt, nr);
  }
  if (args.traces)
    spec.trace_dir = (std::filesystem::path(args.out_dir) / "traces").string();
  return spec;
}

int finish_sweep(const std::vector<maisac::RunRecord>& records,
                 const CommonArgs& args) {
  maisac::emit_results(records, args.out_dir);
  int failed = 0;
  for (const auto& r : records) failed += r.failed ? 1 : 0;
  std::printf("wrote %zu records (%d failed) to %s\n", records.size(), failed,
              args.out_dir.c_str());
  if (failed > 0) {
    for (const auto& r : records)
      if (r.failed)
        std::fprintf(stderr, "failed: %s %s value=%s seed=%llu: %s\n",
                     r.study.c_str(), r.method.c_str(),
                     maisac::format_double(r.swept_value).c_str(),
                     static_cast<unsigned long long>(r.seed), r.error.c_str());
  }
  return maisac::any_failed(records) ? 1 : 0;
}

int run_single(const CommonArgs& args, const std::string& method,
               std::uint64_t seed) {
  maisac::ScenarioConfig cfg = base_config(args);
  cfg.seed = seed;
  cfg.validate();
  const maisac::Scenario scen = maisac::sample_scenario(cfg);

  maisac::CfgsOptions opts;
  opts.combo_cap = args.combo_cap;
  opts.max_position_iters = args.position_iters;

  maisac::IsacSolution sol;
  switch (maisac::parse_method(method)) {
    case maisac::Method::kFpa: sol = maisac::fpa_solve(scen, cfg, opts.solver); break;
    case maisac::Method::kGama: sol = maisac::ga_ma_optimize(scen, cfg, opts); break;
    case maisac::Method::kCfgs: sol = maisac::cfgs_optimize(scen, cfg, opts); break;
  }

  namespace fs = std::filesystem;
  fs::create_directories(args.out_dir);
  const fs::path out(args.out_dir);
  maisac::write_text_file((out / "solution.json").string(),
                          maisac::solution_to_json(sol));
  maisac::write_text_file((out / "trace.csv").string(),
                          maisac::position_trace_to_csv(sol.trace));
  maisac::write_text_file((out / "scenario.json").string(),
                          maisac::scenario_to_json(scen));
  maisac::save_config(cfg, (out / "config.json").string());

  std::printf("method=%s seed=%llu objective=%s comm_sum_rate=%s sensing_mi=%s "
              "converged=%d\n",
              method.c_str(), static_cast<unsigned long long>(seed),
              maisac::format_double(sol.objective_value).c_str(),
              maisac::format_double(sol.comm_sum_rate).c_str(),
              maisac::format_double(sol.sensing_mi).c_str(),
              sol.converged ? 1 : 0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna ISAC experiment driver"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* power = app.add_subcommand("power", "Sweep the transmit power budget");
  add_common(power, &args);
  std::vector<double> grid_dbm{20.0, 30.0, 40.0};
  power->add_option("--grid-dbm", grid_dbm, "Power budgets in dBm")
      ->delimiter(',');

  auto* range = app.add_subcommand("range", "Sweep the Tx movable-range width");
  add_common(range, &args);
  std::vector<double> xmax_lambda{6.0, 8.0, 10.0};
  std::vector<double> ymax_lambda;
  range->add_option("--xmax-lambda", xmax_lambda,
                    "Tx range widths in wavelengths")
      ->delimiter(',');
  range->add_option("--ymax-lambda", ymax_lambda,
                    "Rx range widths in wavelengths (empty keeps the base)")
      ->delimiter(',');

  auto* weights = app.add_subcommand(
      "weights", "Sweep the communication/sensing weight split");
  add_common(weights, &args);
  std::vector<double> wc_grid{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> r0_lambda{10.0, 20.0, 40.0};
  weights->add_option("--wc", wc_grid, "Communication weights in (0, 1)")
      ->delimiter(',');
  weights->add_option("--r0-lambda", r0_lambda,
                      "Array separations in wavelengths")
      ->delimiter(',');

  auto* single = app.add_subcommand("single", "One scenario, one method");
  add_common(single, &args);
  std::string method = "cfgs";
  std::uint64_t seed = 1;
  single->add_option("--method", method, "fpa, gama, or cfgs")
      ->check(CLI::IsMember({"fpa", "gama", "cfgs"}));
  single->add_option("--seed", seed, "Scenario seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(power)) {
      maisac::SweepSpec spec = build_spec(maisac::Study::kPower, args);
      for (double dbm : grid_dbm) spec.grid.push_back(maisac::dbm_to_watts(dbm));
      return finish_sweep(maisac::run_power_sweep(spec), args);
    }
    if (app.got_subcommand(range)) {
      maisac::SweepSpec spec = build_spec(maisac::Study::kRange, args);
      const double lambda = spec.base_config.wavelength;
      for (double x : xmax_lambda) spec.grid.push_back(x * lambda);
      for (double y : ymax_lambda) spec.secondary_values.push_back(y * lambda);
      return finish_sweep(maisac::run_range_sweep(spec), args);
    }
    if (app.got_subcommand(weights)) {
      maisac::SweepSpec spec = build_spec(maisac::Study::kWeights, args);
      spec.grid = wc_grid;
      const double lambda = spec.base_config.wavelength;
      for (double r : r0_lambda) spec.secondary_values.push_back(r * lambda);
      return finish_sweep(maisac::run_weight_sweep(spec), args);
    }
    return run_single(args, method, seed);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
