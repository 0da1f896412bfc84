#include "maisac/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace maisac {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Sampling protocol constants (meters).
constexpr double kUserDistanceMin = 50.0;
constexpr double kUserDistanceMax = 80.0;
constexpr double kTargetDistanceMin = 10.0;
constexpr double kTargetDistanceMax = 20.0;
constexpr double kTargetAngle = kPi / 4.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(n_tx >= 1 && n_rx >= 1, "antenna counts must be at least 1");
  require(n_users >= 1, "n_users must be at least 1");
  require(n_clutters >= 0, "n_clutters must be nonnegative");
  require(n_paths >= 1, "n_paths must be at least 1");
  require(wavelength > 0.0, "wavelength must be positive");
  require(min_spacing > 0.0, "min_spacing must be positive");
  require(tx_range[1] >= tx_range[0], "tx_range must be ordered");
  require(rx_range[1] >= rx_range[0], "rx_range must be ordered");
  require((n_tx - 1) * min_spacing <= tx_range[1] - tx_range[0],
          "tx_range too narrow for n_tx antennas at min_spacing");
  require((n_rx - 1) * min_spacing <= rx_range[1] - rx_range[0],
          "rx_range too narrow for n_rx antennas at min_spacing");
  require(power_budget > 0.0, "power_budget must be positive");
  require(noise_power > 0.0, "noise_power must be positive");
  require(weight_comm >= 0.0 && weight_comm <= 1.0, "weight_comm outside [0,1]");
  require(weight_sense >= 0.0 && weight_sense <= 1.0, "weight_sense outside [0,1]");
  require(std::abs(weight_comm + weight_sense - 1.0) <= 1e-12,
          "weight_comm + weight_sense must equal 1");
  require(array_separation > 0.0, "array_separation must be positive");
  require(antenna_gain > 0.0, "antenna_gain must be positive");
  require(std::isfinite(array_angle), "array_angle must be finite");
}

ScenarioConfig ScenarioConfig::desk_profile() {
  ScenarioConfig cfg;  // defaults are the desk profile
  return cfg;
}

ScenarioConfig ScenarioConfig::full_profile() {
  ScenarioConfig cfg;
  cfg.n_tx = 8;
  cfg.n_rx = 4;
  cfg.n_users = 4;
  cfg.n_clutters = 3;
  cfg.tx_range = {0.0, 0.12};  // 12 wavelengths
  cfg.rx_range = {0.0, 0.08};  // 8 wavelengths
  return cfg;
}

void Scenario::validate(const ScenarioConfig& cfg) const {
  const int k = cfg.n_users;
  const int c = cfg.n_clutters;
  const int l = cfg.n_paths;
  require(user_angles.rows() == k && user_angles.cols() == l, "user_angles shape");
  require(user_gains.rows() == k && user_gains.cols() == l, "user_gains shape");
  require(user_distances.size() == k, "user_distances shape");
  require(clutter_angles.size() == c, "clutter_angles shape");
  require(clutter_distances.size() == c, "clutter_distances shape");
  require(rcs_clutters.size() == c, "rcs_clutters shape");
  require(path_loss_users.size() == k, "path_loss_users shape");
  require(path_loss_clutters.size() == c, "path_loss_clutters shape");

  auto angle_ok = [](double a) { return a >= 0.0 && a <= kPi; };
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < l; ++j)
      require(angle_ok(user_angles(i, j)), "user angle outside [0, pi]");
  require(angle_ok(target_angle), "target angle outside [0, pi]");
  for (int i = 0; i < c; ++i)
    require(angle_ok(clutter_angles(i)), "clutter angle outside [0, pi]");

  require(target_distance > 0.0, "target distance must be positive");
  require((user_distances.array() > 0.0).all(), "user distances must be positive");
  for (int i = 0; i < c; ++i)
    require(clutter_distances(i) > 0.0, "clutter distances must be positive");

  auto loss_matches = [&](double loss, double d) {
    const double expected = friis_path_loss(d, cfg.antenna_gain, cfg.wavelength);
    return loss > 0.0 && std::abs(loss - expected) <= 1e-12 * expected;
  };
  for (int i = 0; i < k; ++i)
    require(loss_matches(path_loss_users(i), user_distances(i)),
            "user path loss inconsistent with distance");
  require(loss_matches(path_loss_target, target_distance),
          "target path loss inconsistent with distance");
  for (int i = 0; i < c; ++i)
    require(loss_matches(path_loss_clutters(i), clutter_distances(i)),
            "clutter path loss inconsistent with distance");
}

double dbm_to_watts(double p_dbm) {
  return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}

double friis_path_loss(double distance, double gain, double lam) {
  if (distance <= 0.0) throw std::invalid_argument("friis_path_loss: distance must be positive");
  const double denom = 4.0 * kPi * distance;
  return gain * lam / (denom * denom);
}

Scenario sample_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const int k = cfg.n_users;
  const int c = cfg.n_clutters;
  const int l = cfg.n_paths;

  Rng rng(cfg.seed);
  Scenario s;
  s.user_angles.resize(k, l);
  s.user_gains.resize(k, l);
  s.user_distances.resize(k);
  s.clutter_angles.resize(c);
  s.clutter_distances.resize(c);
  s.rcs_clutters.resize(c);
  s.path_loss_users.resize(k);
  s.path_loss_clutters.resize(c);

  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < l; ++j) s.user_angles(i, j) = rng.uniform(0.0, kPi);
    for (int j = 0; j < l; ++j) s.user_gains(i, j) = rng.std_complex_gaussian();
    s.user_distances(i) = rng.uniform(kUserDistanceMin, kUserDistanceMax);
    s.path_loss_users(i) =
        friis_path_loss(s.user_distances(i), cfg.antenna_gain, cfg.wavelength);
  }

  s.target_angle = kTargetAngle;
  s.target_distance = rng.uniform(kTargetDistanceMin, kTargetDistanceMax);
  s.rcs_target = rng.std_complex_gaussian();
  s.path_loss_target =
      friis_path_loss(s.target_distance, cfg.antenna_gain, cfg.wavelength);

  for (int i = 0; i < c; ++i) {
    s.clutter_angles(i) = rng.uniform(0.0, kPi);
    s.clutter_distances(i) = rng.uniform(kTargetDistanceMin, kTargetDistanceMax);
    s.rcs_clutters(i) = rng.std_complex_gaussian();
    s.path_loss_clutters(i) =
        friis_path_loss(s.clutter_distances(i), cfg.antenna_gain, cfg.wavelength);
  }

  return s;
}

}  // namespace maisac
