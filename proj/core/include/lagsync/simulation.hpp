#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagsync/agents.hpp"
#include "lagsync/controller.hpp"
#include "lagsync/error.hpp"
#include "lagsync/network.hpp"
#include "lagsync/observer.hpp"

namespace lagsync {

/// One classical fourth-order Runge-Kutta step of x' = f(t, x).
/// Throws NonFiniteState if the result contains NaN or Inf.
template <class F>
Eigen::VectorXd rk4_step(F&& f, const Eigen::VectorXd& x, double t, double h) {
  if (!(h > 0.0)) throw Error("rk4_step: step must be > 0");
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, (x + 0.5 * h * k1).eval());
  const Eigen::VectorXd k3 = f(t + 0.5 * h, (x + 0.5 * h * k2).eval());
  const Eigen::VectorXd k4 = f(t + h, (x + h * k3).eval());
  Eigen::VectorXd next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.allFinite()) throw NonFiniteState("state became non-finite at t = " + std::to_string(t + h));
  return next;
}

struct ControllerConfig {
  ControllerGains gains;
  double kappa = 3.0;
  ControlMode mode = ControlMode::fixed;
  bool allow_uncertified = false;
  double u1_smooth_radius = 0.0;
  /// Value stated in the config, checked against the bounds; informational.
  std::optional<double> epsilon;

  friend bool operator==(const ControllerConfig&, const ControllerConfig&) = default;
};

struct IntegratorSettings {
  double step = 1e-4;
  double horizon = 20.0;
  int record_every = 10;  ///< store one trajectory sample every this many steps

  friend bool operator==(const IntegratorSettings&, const IntegratorSettings&) = default;
};

/// Magnitudes of the seeded initial conditions: each component of eta_i - eta0,
/// q_i and q_i' is drawn uniformly from [-scale, scale].
struct InitialSpec {
  double eta_scale = 2.0;
  double q_scale = 1.0;
  double v_scale = 1.0;

  friend bool operator==(const InitialSpec&, const InitialSpec&) = default;
};

struct Scenario {
  std::string name = "scenario";
  Digraph graph;
  std::optional<Eigen::VectorXd> D_diag;
  LeaderExosystem leader;
  std::vector<ManipulatorParams> agents;
  ThetaRanges theta_ranges = default_theta_ranges();
  BoundsSpec bounds;
  ObserverGains observer;
  ControllerConfig controller;
  IntegratorSettings integrator;
  InitialSpec initial;
  double tolerance = 1e-3;
  std::uint64_t seed = 1;

  /// Throws ValidationError naming the offending key.
  void validate() const;
  /// Switches to the finite-time design: c3 = gamma2 = k2 = 0.
  void apply_mode(ControlMode mode);

  friend bool operator==(const Scenario& l, const Scenario& r);
};

/// Bundled six-manipulator example.
Scenario example_scenario();

struct InitialState {
  Eigen::VectorXd eta0;
  std::vector<Eigen::VectorXd> eta;  ///< followers 1..N at index 0..N-1
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> v;
};

/// Deterministic draw of follower states from the scenario seed and InitialSpec.
InitialState draw_initial_state(const Scenario& s);
InitialState draw_initial_state(const Scenario& s, std::uint64_t seed);

struct AgentSeries {
  std::vector<Eigen::VectorXd> q_err;    ///< q_i - q0
  std::vector<Eigen::VectorXd> v_err;    ///< q_i' - q0'
  std::vector<Eigen::VectorXd> eta_err;  ///< eta_i - eta0
};

/// Uniformly sampled closed-loop trajectory (every record_every steps).
struct Trajectory {
  std::vector<double> times;
  std::vector<AgentSeries> agents;
  std::vector<double> V;  ///< observer Lyapunov function at each sample
  bool has_plants = true;
};

struct SettlingReport {
  std::vector<std::optional<double>> t_obs;
  std::vector<std::optional<double>> t_trk;
  double T1_star = 0.0;
  /// Finite-time observer: state-dependent bound for this run's y(0).
  std::optional<double> T1_finite;
  bool bound_respected = false;
  double max_post_settling_error = 0.0;

  // Diagnostics at full integration resolution.
  double V_initial = 0.0;
  double V_max = 0.0;
  double V_max_increase = 0.0;  ///< largest one-step increase of V before observer settling
  bool lyapunov_monotone = false;
  std::optional<double> feedforward_exact_time;  ///< ||E S S (eta_i - eta0)|| < 1e-6 sustained
  double max_feedforward_error_final = 0.0;

  std::optional<double> max_obs() const;
  std::optional<double> max_trk() const;
};

struct RunResult {
  Trajectory trajectory;
  SettlingReport report;
  LaplacianBundle network;
  ObserverConstants observer_constants;
  GainLedger ledger;
  RobustConfig robust;
  std::uint64_t seed = 0;
};

struct RunOptions {
  bool observer_only = false;  ///< integrate leader and observers only
  bool keep_trajectory = true;
};

/// Integrates leader, observers and plants with fixed-step RK4. Throws
/// AssumptionViolated (no root spanning tree), UncertifiedGains, Divergence.
RunResult run_closed_loop(const Scenario& s, const RunOptions& opt = {});
RunResult run_closed_loop(const Scenario& s, const InitialState& init, const RunOptions& opt = {});

enum class ErrorKind { observer, tracking };

/// Earliest sample time after which the selected error stays below tol for
/// every later sample (0 if always below, nullopt if the last sample is not).
std::vector<std::optional<double>> detect_settling(const Trajectory& traj, double tol, ErrorKind which);

/// Sustained-below criterion on a single series.
std::optional<double> settling_time(const std::vector<double>& times, const std::vector<double>& err,
                                    double tol);

/// Trajectory as CSV: t,agent,q1_err,...,v1_err,...,eta1_err,...,V.
std::string trajectory_csv(const Trajectory& traj);

/// Gnuplot script plotting observer and tracking errors from trajectory.csv
/// with a vertical line at each observer settling instant and at T1*.
std::string gnuplot_script(const RunResult& r, const std::string& csv_name = "trajectory.csv");

struct MonteCarloOptions {
  int runs = 20;
  double scale_lo = 1e-2;
  double scale_hi = 1e2;
  bool observer_only = true;
  unsigned threads = 0;  ///< 0: LAGSYNC_THREADS or hardware concurrency
};

struct MonteCarloRun {
  int index = 0;
  double scale = 0.0;  ///< ||eta_bar(0)||
  std::optional<double> obs_settle;  ///< max over agents
  std::optional<double> trk_settle;
  double bound = 0.0;  ///< T1* (fixed) or T1(y(0)) (finite)
  bool violation = false;
};

struct MonteCarloReport {
  ControlMode mode = ControlMode::fixed;
  double T1_star = 0.0;
  std::vector<MonteCarloRun> runs;
  int violations = 0;
  int unsettled = 0;
  double min_settle = 0.0;
  double max_settle = 0.0;
  double median_settle = 0.0;
  double spread_ratio = 0.0;      ///< max_settle / min_settle
  double spearman_scale = 0.0;    ///< rank correlation of settle vs scale
};

/// Scales ||eta_bar(0)|| log-uniformly in [scale_lo, scale_hi] along seeded
/// random directions; the draws depend only on s.seed and runs, so fixed and
/// finite designs see identical initial conditions.
MonteCarloReport monte_carlo(const Scenario& s, const MonteCarloOptions& opt);

/// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Thread cap from LAGSYNC_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

}  // namespace lagsync
