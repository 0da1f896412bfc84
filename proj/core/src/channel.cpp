#include "maisac/channel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace maisac {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr std::complex<double> kJ{0.0, 1.0};

bool block_feasible(const Eigen::VectorXd& p, const std::array<double, 2>& range,
                    double d0, double tol) {
  const int n = static_cast<int>(p.size());
  for (int i = 0; i < n; ++i) {
    if (p(i) < range[0] - tol || p(i) > range[1] + tol) return false;
    for (int j = i + 1; j < n; ++j)
      if (std::abs(p(i) - p(j)) < d0 - tol) return false;
  }
  return true;
}

}  // namespace

bool AntennaLayout::feasible(const ScenarioConfig& cfg, double tol) const {
  if (tx_positions.size() != cfg.n_tx || rx_positions.size() != cfg.n_rx)
    return false;
  return block_feasible(tx_positions, cfg.tx_range, cfg.min_spacing, tol) &&
         block_feasible(rx_positions, cfg.rx_range, cfg.min_spacing, tol);
}

void AntennaLayout::validate(const ScenarioConfig& cfg) const {
  if (!feasible(cfg))
    throw std::invalid_argument("AntennaLayout violates range or spacing constraints");
}

Eigen::VectorXcd steering_vector(const Eigen::VectorXd& positions, double angle,
                                 double lam) {
  if (lam <= 0.0) throw std::invalid_argument("steering_vector: lam must be positive");
  const double wavenumber_cos = 2.0 * kPi / lam * std::cos(angle);
  Eigen::VectorXcd a(positions.size());
  for (Eigen::Index n = 0; n < positions.size(); ++n)
    a(n) = std::polar(1.0, wavenumber_cos * positions(n));
  return a;
}

Eigen::VectorXcd steering_vector_derivative(const Eigen::VectorXd& positions,
                                            double angle, double lam) {
  const double wavenumber_cos = 2.0 * kPi / lam * std::cos(angle);
  return (kJ * wavenumber_cos) * steering_vector(positions, angle, lam);
}

Eigen::VectorXcd user_channel(const Eigen::VectorXd& tx_positions,
                              const Scenario& scen, const ScenarioConfig& cfg,
                              int k) {
  if (k < 0 || k >= cfg.n_users) throw std::out_of_range("user_channel: user index");
  const double scale = std::sqrt(scen.path_loss_users(k) / cfg.n_paths);
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(tx_positions.size());
  for (int l = 0; l < cfg.n_paths; ++l)
    h += scen.user_gains(k, l) *
         steering_vector(tx_positions, scen.user_angles(k, l), cfg.wavelength);
  return scale * h;
}

Eigen::VectorXcd user_channel_derivative(const Eigen::VectorXd& tx_positions,
                                         const Scenario& scen,
                                         const ScenarioConfig& cfg, int k) {
  if (k < 0 || k >= cfg.n_users) throw std::out_of_range("user_channel_derivative: user index");
  const double scale = std::sqrt(scen.path_loss_users(k) / cfg.n_paths);
  Eigen::VectorXcd dh = Eigen::VectorXcd::Zero(tx_positions.size());
  for (int l = 0; l < cfg.n_paths; ++l)
    dh += scen.user_gains(k, l) *
          steering_vector_derivative(tx_positions, scen.user_angles(k, l),
                                     cfg.wavelength);
  return scale * dh;
}

double pair_distance(double x_i, double y_j, double r0, double theta) {
  const double c = std::cos(theta);
  const double radicand = r0 * r0 + x_i * x_i + y_j * y_j + 2.0 * r0 * y_j * c -
                          2.0 * r0 * x_i * c - 2.0 * y_j * x_i;
  if (radicand < 0.0)
    throw std::domain_error("pair_distance: negative radicand (degenerate geometry)");
  return std::sqrt(radicand);
}

double si_path_loss(double r, double g, double lam) {
  if (r <= 0.0) throw std::invalid_argument("si_path_loss: r must be positive");
  const double u = lam / (2.0 * kPi * r);
  const double u2 = u * u;
  return 0.25 * g * (u2 - u2 * u2 + u2 * u2 * u2);
}

double si_path_loss_derivative(double r, double g, double lam) {
  if (r <= 0.0) throw std::invalid_argument("si_path_loss_derivative: r must be positive");
  const double u = lam / (2.0 * kPi * r);
  const double u2 = u * u;
  // d/dr of (g/4)(u^2 - u^4 + u^6) with du/dr = -u/r.
  return -0.25 * g * (2.0 * u2 - 4.0 * u2 * u2 + 6.0 * u2 * u2 * u2) / r;
}

Eigen::MatrixXcd si_channel(const AntennaLayout& layout, const ScenarioConfig& cfg) {
  const int n_rx = static_cast<int>(layout.rx_positions.size());
  const int n_tx = static_cast<int>(layout.tx_positions.size());
  const double wavenumber = 2.0 * kPi / cfg.wavelength;
  Eigen::MatrixXcd h(n_rx, n_tx);
  for (int j = 0; j < n_rx; ++j) {
    for (int i = 0; i < n_tx; ++i) {
      const double r = pair_distance(layout.tx_positions(i), layout.rx_positions(j),
                                     cfg.array_separation, cfg.array_angle);
      const double amp =
          std::sqrt(si_path_loss(r, cfg.antenna_gain, cfg.wavelength));
      h(j, i) = amp * std::polar(1.0, -wavenumber * r);
    }
  }
  return h;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> si_channel_derivatives(
    const AntennaLayout& layout, const ScenarioConfig& cfg) {
  const int n_rx = static_cast<int>(layout.rx_positions.size());
  const int n_tx = static_cast<int>(layout.tx_positions.size());
  const double wavenumber = 2.0 * kPi / cfg.wavelength;
  const double r0 = cfg.array_separation;
  const double cos_theta = std::cos(cfg.array_angle);
  Eigen::MatrixXcd d_dx(n_rx, n_tx), d_dy(n_rx, n_tx);
  for (int j = 0; j < n_rx; ++j) {
    for (int i = 0; i < n_tx; ++i) {
      const double x = layout.tx_positions(i);
      const double y = layout.rx_positions(j);
      const double r = pair_distance(x, y, r0, cfg.array_angle);
      const double eta = si_path_loss(r, cfg.antenna_gain, cfg.wavelength);
      const double amp = std::sqrt(eta);
      // d amp / dr = eta' / (2 amp); the bracket u^2(1 - u^2 + u^4) stays
      // positive for every r > 0, so amp never vanishes.
      const double damp_dr =
          si_path_loss_derivative(r, cfg.antenna_gain, cfg.wavelength) /
          (2.0 * amp);
      const std::complex<double> phase = std::polar(1.0, -wavenumber * r);
      const std::complex<double> dentry_dr =
          (damp_dr - kJ * wavenumber * amp) * phase;
      const double dr_dx = (x - r0 * cos_theta - y) / r;
      const double dr_dy = (y + r0 * cos_theta - x) / r;
      d_dx(j, i) = dentry_dr * dr_dx;
      d_dy(j, i) = dentry_dr * dr_dy;
    }
  }
  return {d_dx, d_dy};
}

ChannelSet build_channels(const AntennaLayout& layout, const Scenario& scen,
                          const ScenarioConfig& cfg) {
  ChannelSet ch;
  const int k = cfg.n_users;
  const int c = cfg.n_clutters;
  ch.user_channels.resize(layout.tx_positions.size(), k);
  for (int i = 0; i < k; ++i)
    ch.user_channels.col(i) = user_channel(layout.tx_positions, scen, cfg, i);
  ch.target_tx_steer =
      steering_vector(layout.tx_positions, scen.target_angle, cfg.wavelength);
  ch.target_rx_steer =
      steering_vector(layout.rx_positions, scen.target_angle, cfg.wavelength);
  ch.clutter_tx_steer.resize(layout.tx_positions.size(), c);
  ch.clutter_rx_steer.resize(layout.rx_positions.size(), c);
  for (int i = 0; i < c; ++i) {
    ch.clutter_tx_steer.col(i) =
        steering_vector(layout.tx_positions, scen.clutter_angles(i), cfg.wavelength);
    ch.clutter_rx_steer.col(i) =
        steering_vector(layout.rx_positions, scen.clutter_angles(i), cfg.wavelength);
  }
  ch.si_matrix = si_channel(layout, cfg);
  return ch;
}

}  // namespace maisac
