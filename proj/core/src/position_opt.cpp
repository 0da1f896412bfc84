#include "maisac/position_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace maisac {

namespace {

// Substream salts; each deterministic draw site gets its own stream off
// cfg.seed so adding a draw in one place never shifts another.
constexpr std::uint64_t kCoarseInitSalt = 0x636f6172;   // per-combo beamforming init
constexpr std::uint64_t kCoarseSampleSalt = 0x73616d70; // combo_cap subsample
constexpr std::uint64_t kFineInitSalt = 0x66696e65;     // fine-phase beamforming init
constexpr std::uint64_t kGamaLayoutSalt = 0x67616d61;   // random starting layout

// C(n, k), saturating at cap + 1 so callers can detect overflow without UB.
std::int64_t binomial_capped(int n, int k, std::int64_t cap) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > static_cast<unsigned __int128>(cap)) return cap + 1;
  }
  return static_cast<std::int64_t>(r);
}

// rank-th k-subset of {0, ..., m-1} in lexicographic order.
std::vector<int> unrank_combination(std::int64_t rank, int m, int k) {
  constexpr std::int64_t kHuge = std::numeric_limits<std::int64_t>::max() / 2;
  std::vector<int> out(k);
  int v = 0;
  for (int pos = 0; pos < k; ++pos) {
    for (;; ++v) {
      const std::int64_t cnt = binomial_capped(m - 1 - v, k - 1 - pos, kHuge);
      if (rank < cnt) break;
      rank -= cnt;
    }
    out[pos] = v++;
  }
  return out;
}

// cap distinct indices from [0, total), uniformly (Floyd's algorithm), sorted
// ascending so evaluation order — and therefore tie-breaking — is canonical.
std::vector<std::int64_t> sample_indices(std::int64_t total, std::int64_t cap,
                                         Rng rng) {
  std::vector<std::int64_t> out;
  if (total <= cap) {
    out.resize(total);
    for (std::int64_t i = 0; i < total; ++i) out[i] = i;
    return out;
  }
  std::unordered_set<std::int64_t> chosen;
  for (std::int64_t j = total - cap; j < total; ++j) {
    const std::int64_t t = static_cast<std::int64_t>(
        rng.next_u64() % static_cast<std::uint64_t>(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  out.assign(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::VectorXd pick(const std::vector<double>& grid, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = grid[idx[i]];
  return out;
}

Eigen::VectorXd analytic_grad_tx(const AntennaLayout& layout,
                                 const Beamformers& bf, const AuxVars& aux,
                                 const Scenario& scen,
                                 const ScenarioConfig& cfg) {
  const ChannelSet ch = build_channels(layout, scen, cfg);
  const Eigen::MatrixXcd& f = bf.precoder;
  const Eigen::VectorXcd& w = bf.combiner;
  const int n_tx = cfg.n_tx;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n_tx);

  // Communication blocks: only h_k depends on x, entrywise (entry n on x_n).
  const Eigen::MatrixXcd z = ch.user_channels.adjoint() * f;  // K x K
  for (int k = 0; k < cfg.n_users; ++k) {
    const Eigen::VectorXcd dh =
        user_channel_derivative(layout.tx_positions, scen, cfg, k);
    const std::complex<double> lin = std::sqrt(1.0 + aux.mu(k)) * aux.xi_c(k);
    const double quad = std::norm(aux.xi_c(k));
    const Eigen::VectorXcd fz = f * z.row(k).adjoint();  // entry n = sum_j F(n,j) conj(z_kj)
    for (int n = 0; n < n_tx; ++n)
      grad(n) += 2.0 * cfg.weight_comm *
                 (std::real(lin * std::conj(dh(n)) * f(n, k)) -
                  quad * std::real(std::conj(dh(n)) * fz(n)));
  }

  if (cfg.weight_sense > 0.0) {
    const double ws = cfg.weight_sense;
    const double xs2 = aux.xi_s.squaredNorm();
    const double lin_s = 2.0 * ws * std::sqrt(1.0 + aux.mu(cfg.n_users));

    // Target row: S_j = coup_s * (a_s^H f_j); only a_s depends on x.
    const std::complex<double> coup_s = std::sqrt(scen.path_loss_target) *
                                        scen.rcs_target *
                                        (w.adjoint() * ch.target_rx_steer)(0);
    const Eigen::RowVectorXcd s_row =
        coup_s * (ch.target_tx_steer.adjoint() * f);
    const Eigen::VectorXcd das = steering_vector_derivative(
        layout.tx_positions, scen.target_angle, cfg.wavelength);
    const Eigen::VectorXcd f_xi = f * aux.xi_s;
    const Eigen::VectorXcd f_sadj = f * s_row.adjoint();

    // Leakage row: t_j = w^H H f_j; column n of H depends on x_n.
    const Eigen::RowVectorXcd t_row = w.adjoint() * ch.si_matrix * f;
    const auto [d_dx, d_dy] = si_channel_derivatives(layout, cfg);
    const Eigen::RowVectorXcd cx = w.adjoint() * d_dx;  // entry n = sum_m conj(w_m) dH(m,n)/dx_n
    const Eigen::VectorXcd f_tadj = f * t_row.adjoint();

    for (int n = 0; n < n_tx; ++n) {
      const std::complex<double> cs = coup_s * std::conj(das(n));
      grad(n) += lin_s * std::real(cs * f_xi(n));
      double d_bracket = 2.0 * std::real(cs * f_sadj(n)) +
                         2.0 * std::real(cx(n) * f_tadj(n));
      grad(n) -= ws * xs2 * d_bracket;
    }
    for (int c = 0; c < cfg.n_clutters; ++c) {
      const std::complex<double> coup_c =
          std::sqrt(scen.path_loss_clutters(c)) * scen.rcs_clutters(c) *
          (w.adjoint() * ch.clutter_rx_steer.col(c))(0);
      const Eigen::RowVectorXcd c_row =
          coup_c * (ch.clutter_tx_steer.col(c).adjoint() * f);
      const Eigen::VectorXcd dac = steering_vector_derivative(
          layout.tx_positions, scen.clutter_angles(c), cfg.wavelength);
      const Eigen::VectorXcd f_cadj = f * c_row.adjoint();
      for (int n = 0; n < n_tx; ++n)
        grad(n) -= ws * xs2 * 2.0 *
                   std::real(coup_c * std::conj(dac(n)) * f_cadj(n));
    }
  }
  return grad;
}

Eigen::VectorXd analytic_grad_rx(const AntennaLayout& layout,
                                 const Beamformers& bf, const AuxVars& aux,
                                 const Scenario& scen,
                                 const ScenarioConfig& cfg) {
  const int n_rx = cfg.n_rx;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n_rx);
  if (cfg.weight_sense <= 0.0) return grad;  // user channels ignore y

  const ChannelSet ch = build_channels(layout, scen, cfg);
  const Eigen::MatrixXcd& f = bf.precoder;
  const Eigen::VectorXcd& w = bf.combiner;
  const double ws = cfg.weight_sense;
  const double xs2 = aux.xi_s.squaredNorm();
  const double lin_s = 2.0 * ws * std::sqrt(1.0 + aux.mu(cfg.n_users));

  // Target: S_j = sqrt(pl) rcs (w^H b_s)(a_s^H f_j); y enters through b_s.
  const std::complex<double> scale_t =
      std::sqrt(scen.path_loss_target) * scen.rcs_target;
  const Eigen::RowVectorXcd asf = ch.target_tx_steer.adjoint() * f;  // 1 x K
  const Eigen::RowVectorXcd s_row =
      scale_t * (w.adjoint() * ch.target_rx_steer)(0) * asf;
  const Eigen::VectorXcd dbs = steering_vector_derivative(
      layout.rx_positions, scen.target_angle, cfg.wavelength);
  const std::complex<double> asf_xi = (asf * aux.xi_s)(0);
  const std::complex<double> asf_sadj = (asf * s_row.adjoint())(0);

  const Eigen::RowVectorXcd t_row = w.adjoint() * ch.si_matrix * f;
  const auto [d_dx, d_dy] = si_channel_derivatives(layout, cfg);

  for (int m = 0; m < n_rx; ++m) {
    const std::complex<double> dm = scale_t * std::conj(w(m)) * dbs(m);
    grad(m) += lin_s * std::real(dm * asf_xi);
    double d_bracket = 2.0 * std::real(dm * asf_sadj);
    // Leakage: row m of H depends on y_m.
    const Eigen::RowVectorXcd row_f = d_dy.row(m) * f;  // 1 x K
    d_bracket +=
        2.0 * std::real(std::conj(w(m)) * (row_f * t_row.adjoint())(0));
    grad(m) -= ws * xs2 * d_bracket;
  }
  for (int c = 0; c < cfg.n_clutters; ++c) {
    const std::complex<double> scale_c =
        std::sqrt(scen.path_loss_clutters(c)) * scen.rcs_clutters(c);
    const Eigen::RowVectorXcd acf = ch.clutter_tx_steer.col(c).adjoint() * f;
    const Eigen::RowVectorXcd c_row =
        scale_c * (w.adjoint() * ch.clutter_rx_steer.col(c))(0) * acf;
    const Eigen::VectorXcd dbc = steering_vector_derivative(
        layout.rx_positions, scen.clutter_angles(c), cfg.wavelength);
    const std::complex<double> acf_cadj = (acf * c_row.adjoint())(0);
    for (int m = 0; m < n_rx; ++m)
      grad(m) -= ws * xs2 * 2.0 *
                 std::real(scale_c * std::conj(w(m)) * dbc(m) * acf_cadj);
  }
  return grad;
}

Eigen::VectorXd numeric_grad(PositionBlock which, const AntennaLayout& layout,
                             const Beamformers& bf, const AuxVars& aux,
                             const Scenario& scen, const ScenarioConfig& cfg) {
  const double h = 1e-6 * cfg.wavelength;
  AntennaLayout probe = layout;
  Eigen::VectorXd& block =
      which == PositionBlock::kTx ? probe.tx_positions : probe.rx_positions;
  Eigen::VectorXd grad(block.size());
  for (Eigen::Index n = 0; n < block.size(); ++n) {
    const double saved = block(n);
    block(n) = saved + h;
    const double up = surrogate_at(probe, bf, aux, scen, cfg);
    block(n) = saved - h;
    const double down = surrogate_at(probe, bf, aux, scen, cfg);
    block(n) = saved;
    grad(n) = (up - down) / (2.0 * h);
  }
  return grad;
}

// One projected backtracking ascent step on a single coordinate block;
// mutates the layout on acceptance and returns the accepted step length
// (0 when every trial failed to keep the surrogate from decreasing).
double try_block_step(PositionBlock which, AntennaLayout& layout,
                      const Beamformers& bf, const AuxVars& aux,
                      const Scenario& scen, const ScenarioConfig& cfg,
                      const CfgsOptions& opts) {
  const Eigen::VectorXd grad =
      surrogate_grad_positions(which, layout, bf, aux, scen, cfg, opts.grad_mode);
  if (!(grad.norm() > 0.0)) return 0.0;
  Eigen::VectorXd& block =
      which == PositionBlock::kTx ? layout.tx_positions : layout.rx_positions;
  const auto& range = which == PositionBlock::kTx ? cfg.tx_range : cfg.rx_range;
  const double base = surrogate_at(layout, bf, aux, scen, cfg);

  double delta = opts.resolved_step(cfg);
  for (int s = 0; s <= opts.max_backtracks; ++s, delta *= opts.step_shrink) {
    const Eigen::VectorXd cand =
        project_positions(block + delta * grad, range, cfg.min_spacing);
    if ((cand - block).norm() == 0.0) continue;  // projected back onto the incumbent
    AntennaLayout trial = layout;
    (which == PositionBlock::kTx ? trial.tx_positions : trial.rx_positions) = cand;
    if (surrogate_at(trial, bf, aux, scen, cfg) >= base) {
      block = cand;
      return delta;
    }
  }
  return 0.0;
}

}  // namespace

void CfgsOptions::validate(const ScenarioConfig& cfg) const {
  if (!(resolved_step(cfg) > 0.0))
    throw std::invalid_argument("CfgsOptions: step size must resolve positive");
  if (!(step_shrink > 0.0 && step_shrink < 1.0))
    throw std::invalid_argument("CfgsOptions: step_shrink must lie in (0, 1)");
  if (max_backtracks < 0 || max_position_iters < 0)
    throw std::invalid_argument("CfgsOptions: iteration counts must be nonnegative");
  if (!(position_obj_tol > 0.0))
    throw std::invalid_argument("CfgsOptions: position_obj_tol must be positive");
  if (combo_cap < 1)
    throw std::invalid_argument("CfgsOptions: combo_cap must be >= 1");
  if (coarse_inner_iters < 1)
    throw std::invalid_argument("CfgsOptions: coarse_inner_iters must be >= 1");
  solver.validate();
}

double CfgsOptions::resolved_step(const ScenarioConfig& cfg) const {
  return step_size > 0.0 ? step_size : cfg.wavelength / 10.0;
}

double surrogate_at(const AntennaLayout& layout, const Beamformers& bf,
                    const AuxVars& aux, const Scenario& scen,
                    const ScenarioConfig& cfg) {
  return surrogate(build_channels(layout, scen, cfg), bf, aux, scen, cfg);
}

Eigen::VectorXd surrogate_grad_positions(PositionBlock which,
                                         const AntennaLayout& layout,
                                         const Beamformers& bf,
                                         const AuxVars& aux,
                                         const Scenario& scen,
                                         const ScenarioConfig& cfg,
                                         GradMode mode) {
  if (mode == GradMode::kNumeric)
    return numeric_grad(which, layout, bf, aux, scen, cfg);
  return which == PositionBlock::kTx
             ? analytic_grad_tx(layout, bf, aux, scen, cfg)
             : analytic_grad_rx(layout, bf, aux, scen, cfg);
}

Eigen::VectorXd project_positions(const Eigen::VectorXd& raw,
                                  const std::array<double, 2>& range,
                                  double d0) {
  const int n = static_cast<int>(raw.size());
  const double lo = range[0];
  const double hi = range[1];
  if (!(d0 >= 0.0) || !(hi >= lo))
    throw std::invalid_argument("project_positions: bad range or spacing");
  const double slack = 1e-12 * (hi - lo + d0 + 1.0);
  if (n >= 1 && (n - 1) * d0 > hi - lo + slack)
    throw std::invalid_argument(
        "project_positions: spacing does not fit the range");

  Eigen::VectorXd x = raw;
  std::sort(x.data(), x.data() + n);
  double floor_i = lo;
  for (int i = 0; i < n; ++i) {
    const double ceil_i = hi - (n - 1 - i) * d0;
    x(i) = std::max(floor_i, std::min(ceil_i, x(i)));
    floor_i = x(i) + d0;
  }
  return x;
}

std::vector<double> build_grid(const std::array<double, 2>& range,
                               double interval) {
  if (!(interval > 0.0))
    throw std::invalid_argument("build_grid: interval must be positive");
  if (range[1] < range[0])
    throw std::invalid_argument("build_grid: empty range");
  const int count =
      static_cast<int>(std::floor((range[1] - range[0]) / interval + 1e-9)) + 1;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = range[0] + i * interval;
  return grid;
}

std::pair<AntennaLayout, CoarseDiagnostics> coarse_search(
    const Scenario& scen, const ScenarioConfig& cfg, const GridSets& grids,
    const CfgsOptions& opts) {
  cfg.validate();
  opts.validate(cfg);
  const int mx = static_cast<int>(grids.sx.size());
  const int my = static_cast<int>(grids.sy.size());
  if (mx < cfg.n_tx || my < cfg.n_rx)
    throw std::invalid_argument("coarse_search: grids admit no layout");

  constexpr std::int64_t kHuge = std::numeric_limits<std::int64_t>::max() / 4;
  const std::int64_t cx = binomial_capped(mx, cfg.n_tx, kHuge);
  const std::int64_t cy = binomial_capped(my, cfg.n_rx, kHuge);
  if (cx > kHuge || cy > kHuge || cx > kHuge / cy)
    throw std::invalid_argument("coarse_search: candidate set too large to index");
  const std::int64_t total = cx * cy;

  const std::vector<std::int64_t> indices =
      sample_indices(total, opts.combo_cap, Rng(cfg.seed).fork(kCoarseSampleSalt));
  const Rng init_base = Rng(cfg.seed).fork(kCoarseInitSalt);
  SolverOptions inner = opts.solver;
  inner.max_outer = opts.coarse_inner_iters;

  CoarseDiagnostics diag;
  diag.total_combos = total;
  AntennaLayout best;
  double best_score = -std::numeric_limits<double>::infinity();
  std::int64_t best_index = -1;

  for (const std::int64_t idx : indices) {
    AntennaLayout layout;
    layout.tx_positions = pick(grids.sx, unrank_combination(idx / cy, mx, cfg.n_tx));
    layout.rx_positions = pick(grids.sy, unrank_combination(idx % cy, my, cfg.n_rx));
    if (!layout.feasible(cfg)) continue;  // grid tighter than min_spacing
    const ChannelSet ch = build_channels(layout, scen, cfg);
    const SolverInit init = default_solver_init(
        ch, scen, cfg, init_base.fork(static_cast<std::uint64_t>(idx)));
    const SolverState st = run_beamforming_ao(ch, scen, cfg, inner, init);
    ++diag.evaluated_combos;
    const double score = st.history.back();  // true objective (aux refreshed)
    if (score > best_score) {
      best_score = score;
      best = layout;
      best_index = idx;
    }
  }
  if (best_index < 0)
    throw std::invalid_argument("coarse_search: no feasible candidate layout");
  diag.best_index = best_index;
  diag.best_objective = best_score;
  return {best, diag};
}

IsacSolution fine_phase(const AntennaLayout& start, const Scenario& scen,
                        const ScenarioConfig& cfg, const CfgsOptions& opts) {
  cfg.validate();
  opts.validate(cfg);
  AntennaLayout layout = start;
  layout.validate(cfg);

  ChannelSet ch = build_channels(layout, scen, cfg);
  SolverInit init =
      default_solver_init(ch, scen, cfg, Rng(cfg.seed).fork(kFineInitSalt));
  SolverState st = run_beamforming_ao(ch, scen, cfg, opts.solver, init);

  IsacSolution sol;
  double g = st.history.back();
  sol.trace.push_back({0, g, 0.0, 0.0, st.iterations});
  sol.converged = opts.max_position_iters == 0 && st.converged;

  for (int outer = 1; outer <= opts.max_position_iters; ++outer) {
    const double g_prev = g;
    const double step_x =
        try_block_step(PositionBlock::kTx, layout, st.bf, st.aux, scen, cfg, opts);
    const double step_y =
        try_block_step(PositionBlock::kRx, layout, st.bf, st.aux, scen, cfg, opts);
    ch = build_channels(layout, scen, cfg);
    const SolverInit warm{st.bf.combiner, st.aux, st.bf.precoder};
    st = run_beamforming_ao(ch, scen, cfg, opts.solver, warm);
    g = st.history.back();
    sol.trace.push_back({outer, g, step_x, step_y, st.iterations});
    if (std::abs(g - g_prev) < opts.position_obj_tol * (1.0 + std::abs(g))) {
      sol.converged = true;
      break;
    }
  }

  sol.layout = layout;
  sol.bf = st.bf;
  sol.aux = st.aux;
  sol.objective_value = g;
  const LinkGains lg = compute_link_gains(ch, sol.bf, scen, cfg);
  double rates = 0.0;
  for (int k = 0; k < cfg.n_users; ++k) rates += std::log1p(sinr(k, lg, cfg));
  sol.comm_sum_rate = rates;
  sol.sensing_mi = std::log1p(scnr(lg, cfg));
  return sol;
}

IsacSolution cfgs_optimize(const Scenario& scen, const ScenarioConfig& cfg,
                           const CfgsOptions& opts) {
  const GridSets grids{build_grid(cfg.tx_range, cfg.wavelength),
                       build_grid(cfg.rx_range, cfg.wavelength)};
  const auto [layout, diag] = coarse_search(scen, cfg, grids, opts);
  (void)diag;
  return fine_phase(layout, scen, cfg, opts);
}

IsacSolution ga_ma_optimize(const Scenario& scen, const ScenarioConfig& cfg,
                            const CfgsOptions& opts) {
  cfg.validate();
  Rng rng = Rng(cfg.seed).fork(kGamaLayoutSalt);
  const auto draw_block = [&rng](int n, const std::array<double, 2>& range,
                                 double d0) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = rng.uniform(range[0], range[1]);
    std::sort(p.data(), p.data() + n);
    return project_positions(p, range, d0);
  };
  AntennaLayout layout;
  layout.tx_positions = draw_block(cfg.n_tx, cfg.tx_range, cfg.min_spacing);
  layout.rx_positions = draw_block(cfg.n_rx, cfg.rx_range, cfg.min_spacing);
  return fine_phase(layout, scen, cfg, opts);
}

IsacSolution fpa_solve(const Scenario& scen, const ScenarioConfig& cfg,
                       const SolverOptions& solver) {
  AntennaLayout layout;
  const double half = cfg.wavelength / 2.0;
  layout.tx_positions.resize(cfg.n_tx);
  for (int i = 0; i < cfg.n_tx; ++i)
    layout.tx_positions(i) = cfg.tx_range[0] + i * half;
  layout.rx_positions.resize(cfg.n_rx);
  for (int j = 0; j < cfg.n_rx; ++j)
    layout.rx_positions(j) = cfg.rx_range[0] + j * half;
  CfgsOptions opts;
  opts.solver = solver;
  opts.max_position_iters = 0;
  return fine_phase(layout, scen, cfg, opts);
}

}  // namespace maisac
