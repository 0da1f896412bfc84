#pragma once

#include <Eigen/Dense>
#include <utility>

#include "maisac/scenario.hpp"

namespace maisac {

/// Antenna coordinates along the two movable line segments.
struct AntennaLayout {
  Eigen::VectorXd tx_positions;  // N_T, meters
  Eigen::VectorXd rx_positions;  // N_R, meters

  /// True when every coordinate lies in its range and all pairwise
  /// separations are at least cfg.min_spacing (tolerance tol absorbs
  /// projection round-off).
  bool feasible(const ScenarioConfig& cfg, double tol = 1e-9) const;

  /// Throws std::invalid_argument when not feasible.
  void validate(const ScenarioConfig& cfg) const;
};

/// Every channel quantity that depends on the antenna positions.  The echo
/// channels stay factored: the target/clutter contribution is
/// sqrt(path_loss)*rcs*a*b^H, with a and b stored here and the scalars in
/// Scenario, so metric evaluation never materializes N_T x N_R products.
struct ChannelSet {
  Eigen::MatrixXcd user_channels;     // N_T x K, column k = h_k
  Eigen::VectorXcd target_tx_steer;   // N_T, a_s
  Eigen::VectorXcd target_rx_steer;   // N_R, b_s
  Eigen::MatrixXcd clutter_tx_steer;  // N_T x C, column c = a_c
  Eigen::MatrixXcd clutter_rx_steer;  // N_R x C, column c = b_c
  Eigen::MatrixXcd si_matrix;         // N_R x N_T, direct Tx->Rx leakage
};

/// Far-field steering vector: entry n = exp(+j*(2*pi/lam)*positions[n]*cos(angle)).
/// Used for both arrays (transmit and receive forms share the expression).
Eigen::VectorXcd steering_vector(const Eigen::VectorXd& positions, double angle,
                                 double lam);

/// d/d(positions[n]) of the matching steering entry:
/// j*(2*pi/lam)*cos(angle) * entry_n.  Off-diagonal derivatives vanish.
Eigen::VectorXcd steering_vector_derivative(const Eigen::VectorXd& positions,
                                            double angle, double lam);

/// Multipath user channel sqrt(eta_k / L_p) * sum_l rho_{k,l} * a(x, theta_{k,l}).
Eigen::VectorXcd user_channel(const Eigen::VectorXd& tx_positions,
                              const Scenario& scen, const ScenarioConfig& cfg,
                              int k);

/// Elementwise d h_k[n] / d x_n.
Eigen::VectorXcd user_channel_derivative(const Eigen::VectorXd& tx_positions,
                                         const Scenario& scen,
                                         const ScenarioConfig& cfg, int k);

/// Distance between Tx coordinate x_i and Rx coordinate y_j for parallel
/// line arrays whose reference points are r0 apart at angle theta to the
/// common axis: sqrt(r0^2 + x^2 + y^2 + 2 r0 y cos(theta) - 2 r0 x cos(theta) - 2 x y).
/// The radicand equals (r0 cos(theta) + y - x)^2 + (r0 sin(theta))^2, so it is
/// nonnegative for every real input; a negative value (rounding at r ~ 0)
/// throws std::domain_error.
double pair_distance(double x_i, double y_j, double r0, double theta);

/// Near-field leakage power at separation r, with u = lam/(2*pi*r):
/// (g/4)*(u^2 - u^4 + u^6).
double si_path_loss(double r, double g, double lam);

/// d si_path_loss / dr.
double si_path_loss_derivative(double r, double g, double lam);

/// Leakage matrix entry (j,i) = sqrt(si_path_loss(r)) * exp(-j*(2*pi/lam)*r)
/// with r = pair_distance(x_i, y_j, r0, theta).  Note the phase sign is
/// opposite to the steering convention.
Eigen::MatrixXcd si_channel(const AntennaLayout& layout, const ScenarioConfig& cfg);

/// Position derivatives of the leakage matrix through both the phase and the
/// amplitude.  first(j,i) = d[H]_{j,i}/d x_i, second(j,i) = d[H]_{j,i}/d y_j.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> si_channel_derivatives(
    const AntennaLayout& layout, const ScenarioConfig& cfg);

/// Populates every field of ChannelSet for the given layout.
ChannelSet build_channels(const AntennaLayout& layout, const Scenario& scen,
                          const ScenarioConfig& cfg);

}  // namespace maisac
