#include "maisac/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace maisac {

AuxVars AuxVars::zeros(int n_users) {
  AuxVars aux;
  aux.mu = Eigen::VectorXd::Zero(n_users + 1);
  aux.xi_c = Eigen::VectorXcd::Zero(n_users);
  aux.xi_s = Eigen::VectorXcd::Zero(n_users);
  return aux;
}

LinkGains compute_link_gains(const ChannelSet& ch, const Beamformers& bf,
                             const Scenario& scen, const ScenarioConfig& cfg) {
  LinkGains lg;
  lg.user_gain = ch.user_channels.adjoint() * bf.precoder;

  const std::complex<double> target_coupling =
      std::sqrt(scen.path_loss_target) * scen.rcs_target *
      (bf.combiner.adjoint() * ch.target_rx_steer)(0);
  lg.target_row = target_coupling * (ch.target_tx_steer.adjoint() * bf.precoder);

  lg.clutter_rows.resize(cfg.n_clutters, cfg.n_users);
  for (int c = 0; c < cfg.n_clutters; ++c) {
    const std::complex<double> coupling =
        std::sqrt(scen.path_loss_clutters(c)) * scen.rcs_clutters(c) *
        (bf.combiner.adjoint() * ch.clutter_rx_steer.col(c))(0);
    lg.clutter_rows.row(c) =
        coupling * (ch.clutter_tx_steer.col(c).adjoint() * bf.precoder);
  }

  lg.si_row = bf.combiner.adjoint() * ch.si_matrix * bf.precoder;
  lg.combiner_norm2 = bf.combiner.squaredNorm();
  return lg;
}

double sinr(int k, const LinkGains& lg, const ScenarioConfig& cfg) {
  if (k < 0 || k >= cfg.n_users) throw std::out_of_range("sinr: user index");
  const double signal = std::norm(lg.user_gain(k, k));
  double interference = 0.0;
  for (int j = 0; j < cfg.n_users; ++j)
    if (j != k) interference += std::norm(lg.user_gain(k, j));
  return signal / (interference + cfg.noise_power);
}

double sinr(int k, const ChannelSet& ch, const Beamformers& bf,
            const ScenarioConfig& cfg) {
  if (k < 0 || k >= cfg.n_users) throw std::out_of_range("sinr: user index");
  const Eigen::RowVectorXcd row = ch.user_channels.col(k).adjoint() * bf.precoder;
  const double signal = std::norm(row(k));
  double interference = 0.0;
  for (int j = 0; j < cfg.n_users; ++j)
    if (j != k) interference += std::norm(row(j));
  return signal / (interference + cfg.noise_power);
}

double comm_rate(int k, const ChannelSet& ch, const Beamformers& bf,
                 const ScenarioConfig& cfg) {
  return std::log1p(sinr(k, ch, bf, cfg));
}

double scnr(const LinkGains& lg, const ScenarioConfig& cfg) {
  const double signal = lg.target_row.squaredNorm();
  const double denom = lg.clutter_rows.squaredNorm() + lg.si_row.squaredNorm() +
                       lg.combiner_norm2 * cfg.noise_power;
  if (denom <= 0.0) return 0.0;  // zero combiner: nothing received
  return signal / denom;
}

double scnr(const ChannelSet& ch, const Beamformers& bf, const Scenario& scen,
            const ScenarioConfig& cfg) {
  return scnr(compute_link_gains(ch, bf, scen, cfg), cfg);
}

double sensing_mi(const ChannelSet& ch, const Beamformers& bf,
                  const Scenario& scen, const ScenarioConfig& cfg) {
  return std::log1p(scnr(ch, bf, scen, cfg));
}

double objective(const LinkGains& lg, const ScenarioConfig& cfg) {
  double sum_rate = 0.0;
  for (int k = 0; k < cfg.n_users; ++k) sum_rate += std::log1p(sinr(k, lg, cfg));
  return cfg.weight_comm * sum_rate + cfg.weight_sense * std::log1p(scnr(lg, cfg));
}

double objective(const ChannelSet& ch, const Beamformers& bf,
                 const Scenario& scen, const ScenarioConfig& cfg) {
  return objective(compute_link_gains(ch, bf, scen, cfg), cfg);
}

double surrogate(const LinkGains& lg, const AuxVars& aux, const ScenarioConfig& cfg) {
  const int n_users = cfg.n_users;
  double comm = 0.0;
  for (int k = 0; k < n_users; ++k) {
    const double mu = aux.mu(k);
    double denom = cfg.noise_power;  // includes the j = k term below
    for (int j = 0; j < n_users; ++j) denom += std::norm(lg.user_gain(k, j));
    comm += std::log1p(mu) - mu +
            2.0 * std::sqrt(1.0 + mu) * std::real(aux.xi_c(k) * lg.user_gain(k, k)) -
            std::norm(aux.xi_c(k)) * denom;
  }

  const double mu_s = aux.mu(n_users);
  // A: clutter + leakage + target echo + noise powers.
  const double bracket = lg.clutter_rows.squaredNorm() + lg.si_row.squaredNorm() +
                         lg.target_row.squaredNorm() +
                         lg.combiner_norm2 * cfg.noise_power;
  const double sense = std::log1p(mu_s) - mu_s +
                       2.0 * std::sqrt(1.0 + mu_s) *
                           std::real((lg.target_row * aux.xi_s)(0)) -
                       aux.xi_s.squaredNorm() * bracket;

  return cfg.weight_comm * comm + cfg.weight_sense * sense;
}

double surrogate(const ChannelSet& ch, const Beamformers& bf, const AuxVars& aux,
                 const Scenario& scen, const ScenarioConfig& cfg) {
  return surrogate(compute_link_gains(ch, bf, scen, cfg), aux, cfg);
}

}  // namespace maisac
