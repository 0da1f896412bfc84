#pragma once

#include <Eigen/Dense>

#include "maisac/channel.hpp"
#include "maisac/scenario.hpp"

namespace maisac {

/// Transmit precoder (one column per user) and sensing receive combiner.
struct Beamformers {
  Eigen::MatrixXcd precoder;  // N_T x K
  Eigen::VectorXcd combiner;  // N_R

  double transmit_power() const { return precoder.squaredNorm(); }
};

/// Auxiliary variables of the fractional-programming surrogate.  mu has
/// K+1 entries (per-user ratios plus the sensing ratio); xi_c and xi_s have
/// K entries each.
struct AuxVars {
  Eigen::VectorXd mu;    // K+1, nonnegative
  Eigen::VectorXcd xi_c; // K
  Eigen::VectorXcd xi_s; // K

  static AuxVars zeros(int n_users);
};

/// Inner products every metric reduces to, cached so repeated evaluations at
/// fixed (channels, beamformers) cost nothing:
///   user_gain(k, j)   = h_k^H f_j
///   target_row(j)     = sqrt(eta_s) alpha_s (w^H b_s) (a_s^H f_j)
///   clutter_rows(c,j) = sqrt(eta_c) alpha_c (w^H b_c) (a_c^H f_j)
///   si_row(j)         = w^H H_SI f_j
struct LinkGains {
  Eigen::MatrixXcd user_gain;      // K x K
  Eigen::RowVectorXcd target_row;  // 1 x K
  Eigen::MatrixXcd clutter_rows;   // C x K
  Eigen::RowVectorXcd si_row;      // 1 x K
  double combiner_norm2 = 0.0;     // ||w||^2
};

LinkGains compute_link_gains(const ChannelSet& ch, const Beamformers& bf,
                             const Scenario& scen, const ScenarioConfig& cfg);

/// Per-user ratio |h_k^H f_k|^2 / (sum_{j != k} |h_k^H f_j|^2 + noise).
double sinr(int k, const ChannelSet& ch, const Beamformers& bf,
            const ScenarioConfig& cfg);
double sinr(int k, const LinkGains& lg, const ScenarioConfig& cfg);

/// log(1 + sinr), natural log (rates are in nats throughout).
double comm_rate(int k, const ChannelSet& ch, const Beamformers& bf,
                 const ScenarioConfig& cfg);

/// Sensing ratio: target echo power over clutter + leakage + noise power,
/// ||target_row||^2 / (sum_c ||clutter_row_c||^2 + ||si_row||^2 + ||w||^2 noise).
/// Defined as 0 when the combiner is the zero vector.
double scnr(const ChannelSet& ch, const Beamformers& bf, const Scenario& scen,
            const ScenarioConfig& cfg);
double scnr(const LinkGains& lg, const ScenarioConfig& cfg);

/// log(1 + scnr).
double sensing_mi(const ChannelSet& ch, const Beamformers& bf,
                  const Scenario& scen, const ScenarioConfig& cfg);

/// weight_comm * sum_k comm_rate(k) + weight_sense * sensing_mi.
double objective(const ChannelSet& ch, const Beamformers& bf,
                 const Scenario& scen, const ScenarioConfig& cfg);
double objective(const LinkGains& lg, const ScenarioConfig& cfg);

/// Concave surrogate of the objective.  For fixed beamformers it lower-bounds
/// the objective over the auxiliary variables and touches it at their joint
/// optimum:
///   weight_comm * sum_k [ log(1+mu_k) - mu_k
///                         + 2 sqrt(1+mu_k) Re(xi_c_k h_k^H f_k)
///                         - |xi_c_k|^2 (sum_j |h_k^H f_j|^2 + noise) ]
/// + weight_sense * [ log(1+mu_s) - mu_s + 2 sqrt(1+mu_s) Re(target_row xi_s)
///                    - ||xi_s||^2 A ]
/// where mu_s = mu(K) and A = clutter + leakage + target + ||w||^2 noise
/// powers (the target term itself is included in A; the per-user sum over j
/// includes j = k).
double surrogate(const ChannelSet& ch, const Beamformers& bf, const AuxVars& aux,
                 const Scenario& scen, const ScenarioConfig& cfg);
double surrogate(const LinkGains& lg, const AuxVars& aux, const ScenarioConfig& cfg);

}  // namespace maisac
