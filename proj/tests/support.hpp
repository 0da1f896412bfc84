#pragma once

// Shared fixtures: tiny randomized setups whose channel gains are O(1) so the
// numeric reference maximizers stay well conditioned.  Scenario fields are
// drawn directly (distances near the unit-path-loss radius, lifted noise
// floor) instead of going through sample_scenario, whose far-field windows
// would bury everything under ~1e-8 gains.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>

#include "maisac/channel.hpp"
#include "maisac/fp_solver.hpp"
#include "maisac/metrics.hpp"
#include "maisac/rng.hpp"
#include "maisac/scenario.hpp"

namespace support {

inline maisac::ScenarioConfig tiny_config(std::uint64_t seed = 1, int n_tx = 4,
                                          int n_rx = 2, int n_users = 2,
                                          int n_clutters = 1, int n_paths = 2) {
  maisac::ScenarioConfig cfg;
  cfg.n_tx = n_tx;
  cfg.n_rx = n_rx;
  cfg.n_users = n_users;
  cfg.n_clutters = n_clutters;
  cfg.n_paths = n_paths;
  cfg.wavelength = 0.01;
  cfg.min_spacing = 0.005;
  // Three spacing slots per antenna leave room for jitter and projections.
  cfg.tx_range = {0.0, std::max((n_tx - 1) * 3.0 * cfg.min_spacing, cfg.min_spacing)};
  cfg.rx_range = {0.0, std::max((n_rx - 1) * 3.0 * cfg.min_spacing, cfg.min_spacing)};
  cfg.power_budget = 1.0;
  cfg.noise_power = 0.05;
  cfg.weight_comm = 0.6;
  cfg.weight_sense = 0.4;
  cfg.array_separation = 0.2;
  cfg.array_angle = 1.3;
  cfg.antenna_gain = 1.0;
  cfg.seed = seed;
  return cfg;
}

/// Environment draw with O(1) path gains: distances jitter around the radius
/// where friis_path_loss == 1 (sqrt(g lam)/(4 pi)).
inline maisac::Scenario tiny_scenario(const maisac::ScenarioConfig& cfg,
                                      std::uint64_t salt = 0) {
  maisac::Rng rng = maisac::Rng(cfg.seed).fork(0x74657374).fork(salt);
  const double d_unity =
      std::sqrt(cfg.antenna_gain * cfg.wavelength) / (4.0 * M_PI);
  const auto draw_distance = [&] { return d_unity * rng.uniform(0.7, 1.4); };

  maisac::Scenario scen;
  scen.user_angles.resize(cfg.n_users, cfg.n_paths);
  scen.user_gains.resize(cfg.n_users, cfg.n_paths);
  scen.user_distances.resize(cfg.n_users);
  scen.path_loss_users.resize(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    for (int l = 0; l < cfg.n_paths; ++l)
      scen.user_angles(k, l) = rng.uniform(0.0, M_PI);
    for (int l = 0; l < cfg.n_paths; ++l)
      scen.user_gains(k, l) = rng.std_complex_gaussian();
    scen.user_distances(k) = draw_distance();
    scen.path_loss_users(k) = maisac::friis_path_loss(
        scen.user_distances(k), cfg.antenna_gain, cfg.wavelength);
  }
  scen.target_angle = rng.uniform(0.2, M_PI - 0.2);
  scen.target_distance = draw_distance();
  scen.path_loss_target = maisac::friis_path_loss(
      scen.target_distance, cfg.antenna_gain, cfg.wavelength);
  scen.rcs_target = rng.std_complex_gaussian();
  scen.clutter_angles.resize(cfg.n_clutters);
  scen.clutter_distances.resize(cfg.n_clutters);
  scen.rcs_clutters.resize(cfg.n_clutters);
  scen.path_loss_clutters.resize(cfg.n_clutters);
  for (int c = 0; c < cfg.n_clutters; ++c) {
    scen.clutter_angles(c) = rng.uniform(0.0, M_PI);
    scen.clutter_distances(c) = draw_distance();
    scen.rcs_clutters(c) = rng.std_complex_gaussian();
    scen.path_loss_clutters(c) = maisac::friis_path_loss(
        scen.clutter_distances(c), cfg.antenna_gain, cfg.wavelength);
  }
  scen.validate(cfg);
  return scen;
}

/// Evenly spread feasible layout (no randomness).
inline maisac::AntennaLayout spread_layout(const maisac::ScenarioConfig& cfg) {
  maisac::AntennaLayout layout;
  const auto fill = [](Eigen::VectorXd& v, int n, const std::array<double, 2>& r) {
    v.resize(n);
    const double slot = n > 1 ? (r[1] - r[0]) / (n - 1) : 0.0;
    for (int i = 0; i < n; ++i) v(i) = r[0] + i * slot;
  };
  fill(layout.tx_positions, cfg.n_tx, cfg.tx_range);
  fill(layout.rx_positions, cfg.n_rx, cfg.rx_range);
  layout.validate(cfg);
  return layout;
}

/// Feasible layout with per-antenna jitter.  Slots of span/n plus jitter of
/// at most 0.3 slot keep every spacing above 0.7 * span / n >= min_spacing
/// for the roomy ranges tiny_config builds.
inline maisac::AntennaLayout jittered_layout(const maisac::ScenarioConfig& cfg,
                                             maisac::Rng& rng) {
  maisac::AntennaLayout layout;
  const auto fill = [&](Eigen::VectorXd& v, int n, const std::array<double, 2>& r) {
    v.resize(n);
    const double slot = (r[1] - r[0]) / n;
    for (int i = 0; i < n; ++i)
      v(i) = r[0] + i * slot + 0.3 * slot * rng.uniform01();
  };
  fill(layout.tx_positions, cfg.n_tx, cfg.tx_range);
  fill(layout.rx_positions, cfg.n_rx, cfg.rx_range);
  layout.validate(cfg);
  return layout;
}

/// Random beamformers spending power_fraction of the budget.
inline maisac::Beamformers random_beamformers(const maisac::ScenarioConfig& cfg,
                                              maisac::Rng& rng,
                                              double power_fraction = 0.8) {
  maisac::Beamformers bf;
  bf.precoder.resize(cfg.n_tx, cfg.n_users);
  for (int j = 0; j < cfg.n_users; ++j)
    for (int i = 0; i < cfg.n_tx; ++i)
      bf.precoder(i, j) = rng.std_complex_gaussian();
  bf.precoder *= std::sqrt(power_fraction * cfg.power_budget) / bf.precoder.norm();
  bf.combiner.resize(cfg.n_rx);
  for (int i = 0; i < cfg.n_rx; ++i) bf.combiner(i) = rng.std_complex_gaussian();
  return bf;
}

inline maisac::AuxVars random_aux(int n_users, maisac::Rng& rng) {
  maisac::AuxVars aux = maisac::AuxVars::zeros(n_users);
  for (int i = 0; i <= n_users; ++i) aux.mu(i) = rng.uniform(0.1, 2.0);
  for (int k = 0; k < n_users; ++k) {
    aux.xi_c(k) = 0.5 * rng.std_complex_gaussian();
    aux.xi_s(k) = 0.5 * rng.std_complex_gaussian();
  }
  return aux;
}

}  // namespace support
