#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "maisac/metrics.hpp"
#include "maisac/rng.hpp"

namespace maisac {

/// Raised when a linear system that is only guaranteed solvable for a
/// regularized matrix turns out rank-deficient at regularization zero.
struct NumericalRankError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  // Search interval for the power dual variable; the bracket expansion stays
  // inside it.
  std::array<double, 2> tau_bounds{0.0, 1e18};
  double power_tol = 1e-8;  // watts; bisection stops in [budget - tol, budget]
  double obj_tol = 1e-6;    // relative surrogate-change stopping threshold
  int max_outer = 200;
  int max_bisect = 200;

  void validate() const;
};

struct SolverTraceRow {
  int iteration = 0;
  double surrogate_value = 0.0;
  double objective_value = 0.0;
  double power = 0.0;
  double tau = 0.0;
};

struct SolverState {
  Beamformers bf;
  AuxVars aux;
  double tau = 0.0;
  std::vector<double> history;  // surrogate after each full round; non-decreasing
  int iterations = 0;
  bool converged = false;
  std::vector<SolverTraceRow> trace;
};

/// Starting point for the alternating loop.  The precoder is optional; when
/// present the loop can detect an already-converged state in one round.
struct SolverInit {
  Eigen::VectorXcd combiner;
  AuxVars aux;
  std::optional<Eigen::MatrixXcd> precoder;
};

/// Default initialization: combiner uniform on the complex unit sphere (from
/// rng), mu all ones, and a matched-filter precoder (columns along h_k,
/// scaled so the full budget is spent) with xi set by one closed-form pass.
SolverInit default_solver_init(const ChannelSet& ch, const Scenario& scen,
                               const ScenarioConfig& cfg, Rng rng);

/// Optimal precoder for a fixed dual variable tau: column k solves
/// (M + tau I) f_k = phi_k, where M collects the quadratic coupling of every
/// user's interference denominator (sum over ALL users' |xi_c|^2 h h^H) plus
/// the sensing terms (target, clutters, leakage rows) weighted by
/// weight_sense ||xi_s||^2, and phi_k the two matched-filter terms.  M is
/// Hermitian positive semidefinite, so the transpose-conjugate form the
/// stationarity condition is usually written in collapses to this solve.
/// Throws NumericalRankError when tau = 0 and M is numerically singular.
Eigen::MatrixXcd precoder_closed_form(double tau, const ChannelSet& ch,
                                      const AuxVars& aux,
                                      const Eigen::VectorXcd& combiner,
                                      const Scenario& scen,
                                      const ScenarioConfig& cfg);

/// Maximizes the surrogate over the precoder under the power budget.
/// Evaluates tau = 0 first and returns the unconstrained stationary point if
/// it is feasible (complementary slackness); otherwise bisects on tau, using
/// monotonicity of ||F(tau)||^2, until the power lands in
/// [budget - power_tol, budget].
std::pair<Eigen::MatrixXcd, double> solve_precoder(const ChannelSet& ch,
                                                   const AuxVars& aux,
                                                   const Eigen::VectorXcd& combiner,
                                                   const Scenario& scen,
                                                   const ScenarioConfig& cfg,
                                                   const SolverOptions& opts);

/// Stationary point of the surrogate in the combiner: solves Psi w = gamma
/// with Psi = ||xi_s||^2 (clutter + target + leakage outer products +
/// noise * I).  Requires xi_s != 0 (otherwise Psi is singular and every
/// combiner is stationary); throws std::domain_error in that case.
Eigen::VectorXcd combiner_closed_form(const ChannelSet& ch,
                                      const Eigen::MatrixXcd& precoder,
                                      const AuxVars& aux, const Scenario& scen,
                                      const ScenarioConfig& cfg);

/// Block update of xi_s at fixed mu: conjugated target row over the full
/// received-power bracket A.  Returns zeros when A vanishes (zero combiner).
Eigen::VectorXcd update_xi_s(const ChannelSet& ch, const Beamformers& bf,
                             const Eigen::VectorXd& mu, const Scenario& scen,
                             const ScenarioConfig& cfg);

/// Block update of xi_c at fixed mu: sqrt(1+mu_k) (h_k^H f_k)^* over the
/// user's full denominator (interference including j = k, plus noise).
Eigen::VectorXcd update_xi_c(const ChannelSet& ch, const Beamformers& bf,
                             const Eigen::VectorXd& mu,
                             const ScenarioConfig& cfg);

/// Block update of mu at fixed xi: component k maximizes
/// log(1+mu) - mu + 2 sqrt(1+mu) B_k, giving (B^2 + B sqrt(B^2+4))/2 with
/// B_k = Re(xi_c_k h_k^H f_k) and B_{K} = Re(target_row xi_s); negative B is
/// clamped to zero so mu stays nonnegative.
Eigen::VectorXd update_mu(const ChannelSet& ch, const Beamformers& bf,
                          const AuxVars& aux, const Scenario& scen,
                          const ScenarioConfig& cfg);

/// Sets the auxiliary variables to their joint optimum for the current
/// beamformers: mu becomes the achieved per-user and sensing ratios, then
/// xi_c and xi_s follow from their closed forms at that mu.  This is the
/// simultaneous fixed point of the three block updates above, and it is the
/// point where the surrogate equals the true objective exactly, so history
/// entries recorded after a refresh are true objective values.
AuxVars refresh_aux(const ChannelSet& ch, const Beamformers& bf,
                    const Scenario& scen, const ScenarioConfig& cfg);

/// Alternating loop at fixed antenna positions: precoder (bisection on tau),
/// combiner, then the aux refresh, until the surrogate change falls below
/// obj_tol or max_outer is hit.  Every block step is an exact argmax of the
/// surrogate over its block, so the history is non-decreasing; a cheap guard
/// keeps the previous precoder if bisection tolerance ever produced a worse
/// one.
SolverState run_beamforming_ao(const ChannelSet& ch, const Scenario& scen,
                               const ScenarioConfig& cfg,
                               const SolverOptions& opts,
                               const SolverInit& init);

}  // namespace maisac
