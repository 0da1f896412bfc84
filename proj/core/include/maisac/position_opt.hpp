#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "maisac/fp_solver.hpp"

namespace maisac {

/// Candidate coordinate sets for the coarse phase, one per array.
struct GridSets {
  std::vector<double> sx;  // Tx candidates, sorted ascending, within tx_range
  std::vector<double> sy;  // Rx candidates, sorted ascending, within rx_range
};

enum class GradMode { kAnalytic, kNumeric };
enum class PositionBlock { kTx, kRx };

struct CfgsOptions {
  // Initial gradient-ascent step in meters; <= 0 selects wavelength / 10.
  double step_size = 0.0;
  double step_shrink = 0.5;      // backtracking factor, in (0, 1)
  int max_backtracks = 20;       // shrinks per block step before giving up
  int max_position_iters = 100;  // outer position rounds in the fine phase
  double position_obj_tol = 1e-6;  // relative objective-change stop threshold
  GradMode grad_mode = GradMode::kAnalytic;
  // Upper bound on coarse combos evaluated; larger candidate sets are
  // subsampled with a seeded draw so results stay reproducible.
  std::int64_t combo_cap = 2000;
  int coarse_inner_iters = 5;  // beamforming rounds per coarse combo
  SolverOptions solver;

  void validate(const ScenarioConfig& cfg) const;
  double resolved_step(const ScenarioConfig& cfg) const;
};

struct PositionTraceRow {
  int iteration = 0;         // 0 = state right after the initial beamforming
  double objective_value = 0.0;
  double step_x = 0.0;       // accepted step length, 0 when the block move was rejected
  double step_y = 0.0;
  int solver_iterations = 0; // beamforming rounds spent re-converging
};

/// Everything a position-optimization method returns.
struct IsacSolution {
  AntennaLayout layout;
  Beamformers bf;
  AuxVars aux;
  double objective_value = 0.0;
  double comm_sum_rate = 0.0;  // sum of per-user rates, unweighted
  double sensing_mi = 0.0;     // sensing term, unweighted
  bool converged = false;
  std::vector<PositionTraceRow> trace;  // objective_value is non-decreasing
};

struct CoarseDiagnostics {
  std::int64_t total_combos = 0;
  std::int64_t evaluated_combos = 0;
  std::int64_t best_index = 0;  // lexicographic combo index of the winner
  double best_objective = 0.0;
};

/// Gradient of the surrogate with respect to one array's coordinates, at
/// fixed beamformers and auxiliary variables.  The analytic path
/// differentiates every position dependence: user/steering phases for Tx
/// coordinates, receive steering phases for Rx coordinates, and the leakage
/// matrix through each pairwise distance in both its phase and its amplitude.
/// kNumeric evaluates central differences (h = 1e-6 wavelength) instead.
Eigen::VectorXd surrogate_grad_positions(PositionBlock which,
                                         const AntennaLayout& layout,
                                         const Beamformers& bf,
                                         const AuxVars& aux,
                                         const Scenario& scen,
                                         const ScenarioConfig& cfg,
                                         GradMode mode = GradMode::kAnalytic);

/// Surrogate evaluated at a layout with beamformers and aux held fixed
/// (rebuilds the channels; the backtracking and gradient oracles share it).
double surrogate_at(const AntennaLayout& layout, const Beamformers& bf,
                    const AuxVars& aux, const Scenario& scen,
                    const ScenarioConfig& cfg);

/// Nearest-in-spirit feasible point: sorts raw ascending, then runs the
/// cascaded clip x̂_n = max(x̂_{n-1} + d0, min(hi - (N-1-n) d0, x̂_n)) left to
/// right (x̂_0 clips against lo).  Output is sorted, inside [lo, hi], with
/// consecutive gaps >= d0; feasible sorted inputs pass through unchanged.
/// Throws std::invalid_argument when (N-1) d0 exceeds the range width.
Eigen::VectorXd project_positions(const Eigen::VectorXd& raw,
                                  const std::array<double, 2>& range,
                                  double d0);

/// {lo, lo + interval, ...} up to hi inclusive (1e-9 relative slack on the
/// endpoint so hi = lo + k * interval lands exactly k+1 points).
std::vector<double> build_grid(const std::array<double, 2>& range,
                               double interval);

/// Coarse phase: enumerates N_T-subsets of grids.sx crossed with N_R-subsets
/// of grids.sy in lexicographic order (combo index = x_rank * |y subsets| +
/// y_rank), runs the beamforming loop for opts.coarse_inner_iters rounds on
/// each with a per-combo deterministic initialization, and returns the layout
/// with the highest true objective (ties: smallest combo index).  When the
/// total exceeds opts.combo_cap, a seeded uniform subsample of that size is
/// evaluated instead.
std::pair<AntennaLayout, CoarseDiagnostics> coarse_search(
    const Scenario& scen, const ScenarioConfig& cfg, const GridSets& grids,
    const CfgsOptions& opts);

/// Fine phase, shared by every method that moves antennas: converge the
/// beamforming loop, then alternate projected backtracking ascent steps on
/// the Tx block and the Rx block, re-converging the beamformers (warm start)
/// after each round, until the true objective stalls or max_position_iters
/// is reached.  Each block step is accepted only if the surrogate does not
/// decrease, which keeps the objective trace non-decreasing.
IsacSolution fine_phase(const AntennaLayout& start, const Scenario& scen,
                        const ScenarioConfig& cfg, const CfgsOptions& opts);

/// Coarse grid search followed by the fine phase, on wavelength-spaced grids
/// spanning the movable ranges.
IsacSolution cfgs_optimize(const Scenario& scen, const ScenarioConfig& cfg,
                           const CfgsOptions& opts);

/// Gradient-ascent baseline: a random feasible layout (seeded by cfg.seed,
/// sorted and projected), then the fine phase only.
IsacSolution ga_ma_optimize(const Scenario& scen, const ScenarioConfig& cfg,
                            const CfgsOptions& opts);

/// Fixed-position baseline: half-wavelength spacing from each range's lower
/// end, beamforming converged, no position moves.
IsacSolution fpa_solve(const Scenario& scen, const ScenarioConfig& cfg,
                       const SolverOptions& solver = SolverOptions{});

}  // namespace maisac
