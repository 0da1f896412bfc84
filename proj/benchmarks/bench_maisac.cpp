// Microbenchmarks for the hot paths: surrogate evaluation, closed-form
// beamforming rounds, position gradients, and channel assembly.  Sizes come
// from the desk and full-size profiles.

#include <benchmark/benchmark.h>

#include "maisac/fp_solver.hpp"
#include "maisac/position_opt.hpp"

namespace {

struct Fixture {
  maisac::ScenarioConfig cfg;
  maisac::Scenario scen;
  maisac::AntennaLayout layout;
  maisac::ChannelSet ch;
  maisac::Beamformers bf;
  maisac::AuxVars aux;
};

Fixture make_fixture(bool full_scale) {
  Fixture f;
  f.cfg = full_scale ? maisac::ScenarioConfig::full_profile()
                      : maisac::ScenarioConfig::desk_profile();
  f.scen = maisac::sample_scenario(f.cfg);

  const auto spread = [](int n, const std::array<double, 2>& range) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
      x(i) = range[0] +
             (n == 1 ? 0.0 : (range[1] - range[0]) * i / double(n - 1));
    return x;
  };
  f.layout.tx_positions = spread(f.cfg.n_tx, f.cfg.tx_range);
  f.layout.rx_positions = spread(f.cfg.n_rx, f.cfg.rx_range);

  f.ch = maisac::build_channels(f.layout, f.scen, f.cfg);
  maisac::SolverOptions warm;
  warm.max_outer = 3;  // a realistic mid-optimization state
  const maisac::SolverState st = maisac::run_beamforming_ao(
      f.ch, f.scen, f.cfg, warm,
      maisac::default_solver_init(f.ch, f.scen, f.cfg, maisac::Rng(f.cfg.seed)));
  f.bf = st.bf;
  f.aux = st.aux;
  return f;
}

void BM_Surrogate(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0) != 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        maisac::surrogate(f.ch, f.bf, f.aux, f.scen, f.cfg));
}
BENCHMARK(BM_Surrogate)->Arg(0)->Arg(1);

void BM_BeamformingRound(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0) != 0);
  const maisac::SolverOptions opts;
  for (auto _ : state) {
    maisac::Beamformers bf = f.bf;
    const auto [precoder, tau] =
        maisac::solve_precoder(f.ch, f.aux, bf.combiner, f.scen, f.cfg, opts);
    bf.precoder = precoder;
    benchmark::DoNotOptimize(tau);
    bf.combiner =
        maisac::combiner_closed_form(f.ch, bf.precoder, f.aux, f.scen, f.cfg);
    benchmark::DoNotOptimize(
        maisac::refresh_aux(f.ch, bf, f.scen, f.cfg));
  }
}
BENCHMARK(BM_BeamformingRound)->Arg(0)->Arg(1);

void BM_PositionGradient(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0) != 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(maisac::surrogate_grad_positions(
        maisac::PositionBlock::kTx, f.layout, f.bf, f.aux, f.scen, f.cfg));
    benchmark::DoNotOptimize(maisac::surrogate_grad_positions(
        maisac::PositionBlock::kRx, f.layout, f.bf, f.aux, f.scen, f.cfg));
  }
}
BENCHMARK(BM_PositionGradient)->Arg(0)->Arg(1);

void BM_BuildChannels(benchmark::State& state) {
  const Fixture f = make_fixture(state.range(0) != 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(maisac::build_channels(f.layout, f.scen, f.cfg));
}
BENCHMARK(BM_BuildChannels)->Arg(0)->Arg(1);

void BM_CoarseCombo(benchmark::State& state) {
  // One coarse-phase candidate: channel assembly plus five beamforming rounds.
  const Fixture f = make_fixture(false);
  maisac::SolverOptions opts;
  opts.max_outer = 5;
  for (auto _ : state) {
    const maisac::ChannelSet ch =
        maisac::build_channels(f.layout, f.scen, f.cfg);
    benchmark::DoNotOptimize(maisac::run_beamforming_ao(
        ch, f.scen, f.cfg, opts,
        maisac::default_solver_init(ch, f.scen, f.cfg,
                                    maisac::Rng(f.cfg.seed))));
  }
}
BENCHMARK(BM_CoarseCombo);

}  // namespace

BENCHMARK_MAIN();
