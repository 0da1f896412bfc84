#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>

#include "maisac/rng.hpp"

namespace maisac {

/// Static parameters of one simulated setup: array sizes, movable ranges,
/// power/noise levels, objective weights, and the geometry linking the
/// transmit and receive line arrays.  All lengths are meters, powers watts,
/// angles radians.
struct ScenarioConfig {
  int n_tx = 4;       // transmit antennas
  int n_rx = 2;       // receive antennas
  int n_users = 2;    // downlink users
  int n_clutters = 2; // clutter scatterers
  int n_paths = 12;   // propagation paths per user

  double wavelength = 0.01;

  // Movable ranges for the Tx and Rx arrays, [min, max].
  std::array<double, 2> tx_range{0.0, 0.06};
  std::array<double, 2> rx_range{0.0, 0.04};

  double min_spacing = 0.005;  // minimum separation between antennas

  double power_budget = 1.0;   // transmit power budget (30 dBm)
  double noise_power = 1e-9;   // per-user and sensing noise power (-60 dBm)

  double weight_comm = 0.5;    // objective weight on the communication sum rate
  double weight_sense = 0.5;   // objective weight on the sensing term

  // The arrays are two parallel line segments; array_separation is the
  // distance between their reference points and array_angle the angle
  // between the connecting segment and the common array axis.
  double array_separation = 0.2;
  double array_angle = 1.5707963267948966;  // pi/2, broadside

  double antenna_gain = 1.0;

  std::uint64_t seed = 1;

  /// Throws std::invalid_argument if any invariant is violated: weights must
  /// be in [0,1] and sum to 1 (1e-12), each range must admit its antenna
  /// count at min_spacing, and all physical quantities must be positive.
  void validate() const;

  /// Small configuration that runs the full pipeline in seconds.
  static ScenarioConfig desk_profile();

  /// Full-size configuration (8x4 arrays, 4 users, 3 clutters, 12λ/8λ
  /// ranges).  Runnable but slow through the grid search.
  static ScenarioConfig full_profile();
};

/// One sampled environment: user path angles/gains, target and clutter
/// geometry, reflection coefficients, and the free-space path losses
/// derived from the sampled distances.
struct Scenario {
  Eigen::MatrixXd user_angles;        // K x L_p, radians in [0, pi]
  Eigen::MatrixXcd user_gains;        // K x L_p, CN(0,1) path gains
  Eigen::VectorXd user_distances;     // K, meters
  double target_angle = 0.0;
  double target_distance = 0.0;
  Eigen::VectorXd clutter_angles;     // C
  Eigen::VectorXd clutter_distances;  // C
  std::complex<double> rcs_target{0.0, 0.0};
  Eigen::VectorXcd rcs_clutters;      // C
  Eigen::VectorXd path_loss_users;    // K
  double path_loss_target = 0.0;
  Eigen::VectorXd path_loss_clutters; // C

  /// Throws std::invalid_argument when shapes, angle/distance ranges, or the
  /// path-loss/distance consistency checks fail.
  void validate(const ScenarioConfig& cfg) const;
};

/// 10^((p-30)/10): dBm to watts.
double dbm_to_watts(double p_dbm);

/// Free-space path loss g*lam/(4*pi*d)^2.  The lam factor enters linearly
/// (not squared); this matches the simulated model, see README.
double friis_path_loss(double distance, double gain, double lam);

/// Draws one environment.  Deterministic given cfg.seed; the draw order is
/// fixed: per user k (L_p angles, then L_p gains, then the distance), then
/// target distance, target reflection coefficient, then per clutter c
/// (angle, distance, reflection coefficient).  User/clutter angles are
/// uniform on [0, pi]; the target sits at angle pi/4; user distances are
/// uniform on [50, 80] m, target and clutter distances on [10, 20] m.
/// Antenna counts do not influence the draws, so scenarios are comparable
/// across array configurations for a fixed seed.
Scenario sample_scenario(const ScenarioConfig& cfg);

}  // namespace maisac
