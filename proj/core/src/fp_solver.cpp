#include "maisac/fp_solver.hpp"

#include <cmath>
#include <limits>

namespace maisac {

namespace {

// Quadratic matrix and linear terms of the surrogate as a function of the
// precoder: the surrogate is sum_k [2 Re(phi_k^H f_k) - f_k^H M f_k] + const,
// separable per column with a shared M.
struct PrecoderSystem {
  Eigen::MatrixXcd quad;  // M, N_T x N_T, Hermitian PSD
  Eigen::MatrixXcd rhs;   // columns phi_k, N_T x K
};

PrecoderSystem build_precoder_system(const ChannelSet& ch, const AuxVars& aux,
                                     const Eigen::VectorXcd& combiner,
                                     const Scenario& scen,
                                     const ScenarioConfig& cfg) {
  const int n_tx = static_cast<int>(ch.user_channels.rows());
  const int n_users = cfg.n_users;
  PrecoderSystem sys;
  sys.quad = Eigen::MatrixXcd::Zero(n_tx, n_tx);

  // Every user's denominator contains |h_i^H f_k|^2 for every column k, so
  // the coupling sums over all users, not only the column's own.
  for (int i = 0; i < n_users; ++i)
    sys.quad += (cfg.weight_comm * std::norm(aux.xi_c(i))) *
                (ch.user_channels.col(i) * ch.user_channels.col(i).adjoint());

  const double xs2 = aux.xi_s.squaredNorm();
  const std::complex<double> wb_s = (combiner.adjoint() * ch.target_rx_steer)(0);
  if (cfg.weight_sense > 0.0 && xs2 > 0.0) {
    const double ws_xs2 = cfg.weight_sense * xs2;
    const double target_gain =
        scen.path_loss_target * std::norm(scen.rcs_target) * std::norm(wb_s);
    sys.quad += (ws_xs2 * target_gain) *
                (ch.target_tx_steer * ch.target_tx_steer.adjoint());
    for (int c = 0; c < cfg.n_clutters; ++c) {
      const std::complex<double> wb_c =
          (combiner.adjoint() * ch.clutter_rx_steer.col(c))(0);
      const double clutter_gain = scen.path_loss_clutters(c) *
                                  std::norm(scen.rcs_clutters(c)) * std::norm(wb_c);
      sys.quad += (ws_xs2 * clutter_gain) *
                  (ch.clutter_tx_steer.col(c) * ch.clutter_tx_steer.col(c).adjoint());
    }
    const Eigen::VectorXcd leak = ch.si_matrix.adjoint() * combiner;  // H^H w
    sys.quad += ws_xs2 * (leak * leak.adjoint());
  }

  sys.rhs.resize(n_tx, n_users);
  const std::complex<double> sense_coeff =
      cfg.weight_sense * std::sqrt(1.0 + aux.mu(n_users)) *
      std::sqrt(scen.path_loss_target) * std::conj(scen.rcs_target) *
      std::conj(wb_s);
  for (int k = 0; k < n_users; ++k) {
    sys.rhs.col(k) = (cfg.weight_comm * std::sqrt(1.0 + aux.mu(k)) *
                      std::conj(aux.xi_c(k))) *
                     ch.user_channels.col(k);
    sys.rhs.col(k) += (sense_coeff * std::conj(aux.xi_s(k))) * ch.target_tx_steer;
  }
  return sys;
}

Eigen::MatrixXcd solve_precoder_system(const PrecoderSystem& sys, double tau) {
  const int n = static_cast<int>(sys.quad.rows());
  const Eigen::MatrixXcd shifted =
      sys.quad + tau * Eigen::MatrixXcd::Identity(n, n);
  if (tau > 0.0) {
    Eigen::LLT<Eigen::MatrixXcd> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.solve(sys.rhs);
  }
  Eigen::LDLT<Eigen::MatrixXcd> ldlt(shifted);
  const Eigen::VectorXd d = ldlt.vectorD().real();
  const double d_max = d.maxCoeff();
  const double d_min = d.minCoeff();
  if (d_max <= 0.0 || d_min <= 1e-13 * d_max) {
    if (sys.rhs.norm() == 0.0)
      return Eigen::MatrixXcd::Zero(n, sys.rhs.cols());
    throw NumericalRankError("precoder system singular at tau = " +
                             std::to_string(tau));
  }
  return ldlt.solve(sys.rhs);
}

double clamped_mu(double b) {
  if (b <= 0.0) return 0.0;  // the 1-D dual objective peaks at zero for B <= 0
  return 0.5 * (b * b + b * std::sqrt(b * b + 4.0));
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tau_bounds[0] >= 0.0 && tau_bounds[0] < tau_bounds[1]))
    throw std::invalid_argument("SolverOptions: need 0 <= tau_min < tau_max");
  if (!(power_tol > 0.0) || !(obj_tol > 0.0))
    throw std::invalid_argument("SolverOptions: tolerances must be positive");
  if (max_outer < 1 || max_bisect < 1)
    throw std::invalid_argument("SolverOptions: iteration caps must be >= 1");
}

SolverInit default_solver_init(const ChannelSet& ch, const Scenario& scen,
                               const ScenarioConfig& cfg, Rng rng) {
  SolverInit init;
  init.combiner.resize(cfg.n_rx);
  for (int j = 0; j < cfg.n_rx; ++j) init.combiner(j) = rng.std_complex_gaussian();
  const double norm = init.combiner.norm();
  if (norm > 0.0)
    init.combiner /= norm;
  else
    init.combiner(0) = 1.0;

  init.aux.mu = Eigen::VectorXd::Ones(cfg.n_users + 1);

  Eigen::MatrixXcd matched(cfg.n_tx, cfg.n_users);
  const double col_power = cfg.power_budget / cfg.n_users;
  for (int k = 0; k < cfg.n_users; ++k) {
    const double h_norm = ch.user_channels.col(k).norm();
    if (h_norm > 0.0)
      matched.col(k) = (std::sqrt(col_power) / h_norm) * ch.user_channels.col(k);
    else
      matched.col(k).setZero();
  }
  Beamformers bf{matched, init.combiner};
  init.aux.xi_c = update_xi_c(ch, bf, init.aux.mu, cfg);
  init.aux.xi_s = update_xi_s(ch, bf, init.aux.mu, scen, cfg);
  init.precoder = std::move(matched);
  return init;
}

Eigen::MatrixXcd precoder_closed_form(double tau, const ChannelSet& ch,
                                      const AuxVars& aux,
                                      const Eigen::VectorXcd& combiner,
                                      const Scenario& scen,
                                      const ScenarioConfig& cfg) {
  if (tau < 0.0) throw std::invalid_argument("precoder_closed_form: tau must be >= 0");
  return solve_precoder_system(build_precoder_system(ch, aux, combiner, scen, cfg),
                               tau);
}

std::pair<Eigen::MatrixXcd, double> solve_precoder(const ChannelSet& ch,
                                                   const AuxVars& aux,
                                                   const Eigen::VectorXcd& combiner,
                                                   const Scenario& scen,
                                                   const ScenarioConfig& cfg,
                                                   const SolverOptions& opts) {
  opts.validate();
  const PrecoderSystem sys = build_precoder_system(ch, aux, combiner, scen, cfg);
  const double budget = cfg.power_budget;

  // Complementary slackness: if the unconstrained stationary point fits the
  // budget, the dual variable is zero.  A rank-deficient system at tau = 0 is
  // replaced by a vanishing regularization.
  double lo = opts.tau_bounds[0];
  Eigen::MatrixXcd trial;
  try {
    trial = solve_precoder_system(sys, lo);
  } catch (const NumericalRankError&) {
    const int n = static_cast<int>(sys.quad.rows());
    lo = std::max(lo, 1e-12 * (1.0 + sys.quad.trace().real() / n));
    trial = solve_precoder_system(sys, lo);
  }
  if (trial.squaredNorm() <= budget) return {trial, lo};

  // Constraint active: expand the bracket geometrically, then bisect.  Power
  // is non-increasing in tau, so the invariant is power(lo) > budget >=
  // power(hi).
  double hi = std::max(sys.rhs.norm() / std::sqrt(budget), 2.0 * std::max(lo, 1e-12));
  Eigen::MatrixXcd best;
  bool bracketed = false;
  for (int i = 0; i < 200 && hi <= opts.tau_bounds[1]; ++i) {
    best = solve_precoder_system(sys, hi);
    if (best.squaredNorm() <= budget) {
      bracketed = true;
      break;
    }
    lo = hi;
    hi *= 2.0;
  }
  if (!bracketed)
    throw std::runtime_error("solve_precoder: bracket expansion exhausted tau bound");

  double best_tau = hi;
  for (int i = 0; i < opts.max_bisect; ++i) {
    const double mid = 0.5 * (lo + hi);
    const Eigen::MatrixXcd f = solve_precoder_system(sys, mid);
    const double power = f.squaredNorm();
    if (power > budget) {
      lo = mid;
    } else {
      best = f;
      best_tau = mid;
      if (power >= budget - opts.power_tol) return {f, mid};
      hi = mid;
    }
  }
  return {best, best_tau};  // feasible endpoint when the cap is exhausted
}

Eigen::VectorXcd combiner_closed_form(const ChannelSet& ch,
                                      const Eigen::MatrixXcd& precoder,
                                      const AuxVars& aux, const Scenario& scen,
                                      const ScenarioConfig& cfg) {
  const double xs2 = aux.xi_s.squaredNorm();
  if (xs2 <= 0.0)
    throw std::domain_error("combiner_closed_form: xi_s = 0 leaves every combiner stationary");
  const int n_rx = cfg.n_rx;

  Eigen::MatrixXcd psi =
      cfg.noise_power * Eigen::MatrixXcd::Identity(n_rx, n_rx);
  const Eigen::RowVectorXcd target_tx_row = ch.target_tx_steer.adjoint() * precoder;
  psi += (scen.path_loss_target * std::norm(scen.rcs_target) *
          target_tx_row.squaredNorm()) *
         (ch.target_rx_steer * ch.target_rx_steer.adjoint());
  for (int c = 0; c < cfg.n_clutters; ++c) {
    const double gain = scen.path_loss_clutters(c) * std::norm(scen.rcs_clutters(c)) *
                        (ch.clutter_tx_steer.col(c).adjoint() * precoder).squaredNorm();
    psi += gain * (ch.clutter_rx_steer.col(c) * ch.clutter_rx_steer.col(c).adjoint());
  }
  const Eigen::MatrixXcd leak = ch.si_matrix * precoder;  // N_R x K
  psi += leak * leak.adjoint();
  psi *= xs2;

  const std::complex<double> gamma_scale =
      std::sqrt((1.0 + aux.mu(cfg.n_users)) * scen.path_loss_target) *
      scen.rcs_target * (target_tx_row * aux.xi_s)(0);
  const Eigen::VectorXcd gamma = gamma_scale * ch.target_rx_steer;
  return psi.llt().solve(gamma);
}

Eigen::VectorXcd update_xi_s(const ChannelSet& ch, const Beamformers& bf,
                             const Eigen::VectorXd& mu, const Scenario& scen,
                             const ScenarioConfig& cfg) {
  const LinkGains lg = compute_link_gains(ch, bf, scen, cfg);
  const double bracket = lg.clutter_rows.squaredNorm() + lg.si_row.squaredNorm() +
                         lg.target_row.squaredNorm() +
                         lg.combiner_norm2 * cfg.noise_power;
  if (bracket <= std::numeric_limits<double>::min())
    return Eigen::VectorXcd::Zero(cfg.n_users);
  return (std::sqrt(1.0 + mu(cfg.n_users)) / bracket) * lg.target_row.adjoint();
}

Eigen::VectorXcd update_xi_c(const ChannelSet& ch, const Beamformers& bf,
                             const Eigen::VectorXd& mu,
                             const ScenarioConfig& cfg) {
  const Eigen::MatrixXcd gains = ch.user_channels.adjoint() * bf.precoder;
  Eigen::VectorXcd xi(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) {
    const double denom = gains.row(k).squaredNorm() + cfg.noise_power;
    xi(k) = std::sqrt(1.0 + mu(k)) * std::conj(gains(k, k)) / denom;
  }
  return xi;
}

Eigen::VectorXd update_mu(const ChannelSet& ch, const Beamformers& bf,
                          const AuxVars& aux, const Scenario& scen,
                          const ScenarioConfig& cfg) {
  const LinkGains lg = compute_link_gains(ch, bf, scen, cfg);
  Eigen::VectorXd mu(cfg.n_users + 1);
  for (int k = 0; k < cfg.n_users; ++k)
    mu(k) = clamped_mu(std::real(aux.xi_c(k) * lg.user_gain(k, k)));
  mu(cfg.n_users) = clamped_mu(std::real((lg.target_row * aux.xi_s)(0)));
  return mu;
}

AuxVars refresh_aux(const ChannelSet& ch, const Beamformers& bf,
                    const Scenario& scen, const ScenarioConfig& cfg) {
  const LinkGains lg = compute_link_gains(ch, bf, scen, cfg);
  AuxVars aux = AuxVars::zeros(cfg.n_users);
  for (int k = 0; k < cfg.n_users; ++k) aux.mu(k) = sinr(k, lg, cfg);
  aux.mu(cfg.n_users) = scnr(lg, cfg);

  for (int k = 0; k < cfg.n_users; ++k) {
    const double denom = lg.user_gain.row(k).squaredNorm() + cfg.noise_power;
    aux.xi_c(k) =
        std::sqrt(1.0 + aux.mu(k)) * std::conj(lg.user_gain(k, k)) / denom;
  }
  const double bracket = lg.clutter_rows.squaredNorm() + lg.si_row.squaredNorm() +
                         lg.target_row.squaredNorm() +
                         lg.combiner_norm2 * cfg.noise_power;
  if (bracket > std::numeric_limits<double>::min())
    aux.xi_s = (std::sqrt(1.0 + aux.mu(cfg.n_users)) / bracket) *
               lg.target_row.adjoint();
  return aux;
}

SolverState run_beamforming_ao(const ChannelSet& ch, const Scenario& scen,
                               const ScenarioConfig& cfg,
                               const SolverOptions& opts,
                               const SolverInit& init) {
  opts.validate();
  cfg.validate();

  SolverState st;
  st.bf.combiner = init.combiner;
  st.aux = init.aux;

  double prev = -std::numeric_limits<double>::infinity();
  if (init.precoder) {
    st.bf.precoder = *init.precoder;
    prev = surrogate(ch, st.bf, st.aux, scen, cfg);
  }

  for (int it = 1; it <= opts.max_outer; ++it) {
    auto [f, tau] = solve_precoder(ch, st.aux, st.bf.combiner, scen, cfg, opts);
    if (st.bf.precoder.size() > 0) {
      // Bisection tolerance can in principle return a marginally worse
      // feasible point than the incumbent; keep whichever scores higher.
      Beamformers candidate{f, st.bf.combiner};
      if (surrogate(ch, candidate, st.aux, scen, cfg) >=
          surrogate(ch, st.bf, st.aux, scen, cfg)) {
        st.bf.precoder = std::move(f);
        st.tau = tau;
      }
    } else {
      st.bf.precoder = std::move(f);
      st.tau = tau;
    }

    if (cfg.weight_sense > 0.0 && st.aux.xi_s.squaredNorm() > 0.0)
      st.bf.combiner = combiner_closed_form(ch, st.bf.precoder, st.aux, scen, cfg);

    st.aux = refresh_aux(ch, st.bf, scen, cfg);
    const double g = surrogate(ch, st.bf, st.aux, scen, cfg);
    if (!std::isfinite(g))
      throw std::runtime_error("run_beamforming_ao: surrogate became non-finite at iteration " +
                               std::to_string(it));
    st.history.push_back(g);
    st.trace.push_back({it, g, objective(ch, st.bf, scen, cfg),
                        st.bf.transmit_power(), st.tau});
    st.iterations = it;
    if (std::abs(g - prev) < opts.obj_tol * (1.0 + std::abs(g))) {
      st.converged = true;
      break;
    }
    prev = g;
  }
  return st;
}

}  // namespace maisac
