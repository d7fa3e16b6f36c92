#include "lagsync/simulation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "lagsync/error.hpp"
#include "sampling.hpp"

namespace lagsync {

namespace {

void require(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw ValidationError(key, constraint);
}

}  // namespace

void Scenario::validate() const {
  const int N = graph.n_followers();
  require(N >= 1, "network.followers", "must be >= 1");
  require(has_root_spanning_tree(graph), "network.edge",
          "node 0 must reach every follower (spanning tree rooted at the leader)");
  if (D_diag) {
    require(D_diag->size() == N, "network.D_diag", "needs one entry per follower");
    require(D_diag->minCoeff() > 0.0, "network.D_diag", "entries must be > 0");
  }
  require(leader.S.rows() > 0 && leader.S.rows() == leader.S.cols(), "leader.S", "must be square");
  require(leader.E.cols() == leader.S.rows() && leader.E.rows() > 0, "leader.E",
          "must have as many columns as S");
  require(leader.eta0.size() == leader.S.rows(), "leader.eta0", "must match the size of S");
  require(static_cast<int>(agents.size()) == N, "agents.theta", "needs one parameter set per follower");
  for (const auto& a : agents) {
    require(std::all_of(a.theta.begin(), a.theta.end(), [](double t) { return t > 0.0; }),
            "agents.theta", "entries must be > 0");
  }
  require(leader.E.rows() == 2, "leader.E", "must have 2 rows (two-link arms)");
  for (const auto& [lo, hi] : theta_ranges) {
    require(lo > 0.0 && lo <= hi, "agents.theta_ranges", "each range must satisfy 0 < lo <= hi");
  }
  require(bounds.kM_inv > 0.0 && bounds.km_inv > bounds.kM_inv, "agents.bounds",
          "requires km_inv > kM_inv > 0");
  require(bounds.kc >= 0.0 && bounds.kg >= 0.0, "agents.bounds", "kc and kg must be >= 0");
  require(observer.c2 > 0.0, "observer.c2", "must be > 0");
  require(observer.c3 >= 0.0, "observer.c3", "must be >= 0");
  require(observer.a.value() > 0.0 && observer.a.value() < 1.0, "observer.a", "must lie in (0, 1)");
  if (observer.c3 > 0.0) {
    require(observer.b.value() > 1.0 / observer.a.value(), "observer.b", "must exceed 1/a");
  }
  try {
    ControlExponents::from(controller.gains.alpha, controller.gains.beta);
  } catch (const InvalidExponents& e) {
    throw ValidationError("controller.alpha", e.what());
  }
  require(controller.kappa >= 1.0, "controller.kappa", "must be >= 1");
  require(controller.u1_smooth_radius >= 0.0, "controller.u1_smooth_radius", "must be >= 0");
  if (controller.epsilon) {
    const double eps = (bounds.km_inv - bounds.kM_inv) / (bounds.km_inv + bounds.kM_inv);
    require(std::abs(*controller.epsilon - eps) <= 1e-9, "controller.epsilon",
            "must equal (km_inv - kM_inv)/(km_inv + kM_inv) = " + std::to_string(eps));
  }
  require(integrator.step > 0.0, "integrator.step", "must be > 0");
  require(integrator.horizon > integrator.step, "integrator.horizon", "must exceed the step");
  require(integrator.record_every >= 1, "integrator.record_every", "must be >= 1");
  require(tolerance > 0.0, "tolerance", "must be > 0");
  require(initial.eta_scale >= 0.0 && initial.q_scale >= 0.0 && initial.v_scale >= 0.0, "initial",
          "scales must be >= 0");
}

void Scenario::apply_mode(ControlMode mode) {
  controller.mode = mode;
  if (mode == ControlMode::finite) {
    observer.c3 = 0.0;
    controller.gains.gamma2 = 0.0;
    controller.gains.k2 = 0.0;
  }
}

bool operator==(const Scenario& l, const Scenario& r) {
  auto same_opt = [](const std::optional<Eigen::VectorXd>& a, const std::optional<Eigen::VectorXd>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || (a->size() == b->size() && *a == *b);
  };
  auto same_mat = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return l.name == r.name && l.graph == r.graph && same_opt(l.D_diag, r.D_diag) &&
         same_mat(l.leader.S, r.leader.S) && same_mat(l.leader.E, r.leader.E) &&
         same_mat(l.leader.eta0, r.leader.eta0) && l.agents == r.agents &&
         l.theta_ranges == r.theta_ranges && l.bounds == r.bounds && l.observer == r.observer &&
         l.controller == r.controller && l.integrator == r.integrator && l.initial == r.initial &&
         l.tolerance == r.tolerance && l.seed == r.seed;
}

Scenario example_scenario() {
  Scenario s;
  s.name = "paper_example";
  s.graph = default_topology(6);
  s.D_diag = Eigen::VectorXd::Constant(6, 8.0);
  s.leader.S = (Eigen::MatrixXd(2, 2) << 0.0, 1.0, -1.0, 0.0).finished();
  s.leader.E = Eigen::MatrixXd::Identity(2, 2);
  s.leader.eta0 = Eigen::Vector2d(1.0, 0.0);
  s.agents.assign(6, ManipulatorParams{{7.0, 0.96, 1.2, 5.96, 2.0, 1.2}, 9.8});
  s.theta_ranges = default_theta_ranges();
  s.bounds = {0.3, 0.08, 3.0, 50.0};
  s.observer = {8.4, 1.0, 1.0, OddRational(3, 5), OddRational(3, 1)};
  s.controller.gains = {OddRational(7, 9), OddRational(9, 7), 10.0, 10.0, 20.0, 15.0};
  s.controller.kappa = 3.0;
  s.controller.mode = ControlMode::fixed;
  s.controller.allow_uncertified = true;
  s.controller.epsilon = 11.0 / 19.0;
  s.integrator = {1e-4, 20.0, 10};
  s.initial = {2.0, 1.0, 1.0};
  s.tolerance = 1e-3;
  s.seed = 2021;
  return s;
}

InitialState draw_initial_state(const Scenario& s) { return draw_initial_state(s, s.seed); }

InitialState draw_initial_state(const Scenario& s, std::uint64_t seed) {
  detail::Rng rng(seed);
  const int N = s.graph.n_followers();
  const int n = s.leader.n();
  const int m = s.leader.m();
  InitialState init;
  init.eta0 = s.leader.eta0;
  for (int i = 0; i < N; ++i) {
    Eigen::VectorXd e(n), q(m), v(m);
    for (int k = 0; k < n; ++k) e[k] = s.initial.eta_scale * rng.symmetric();
    for (int k = 0; k < m; ++k) q[k] = s.initial.q_scale * rng.symmetric();
    for (int k = 0; k < m; ++k) v[k] = s.initial.v_scale * rng.symmetric();
    init.eta.push_back(init.eta0 + e);
    init.q.push_back(q);
    init.v.push_back(v);
  }
  return init;
}

std::optional<double> SettlingReport::max_obs() const {
  double t = 0.0;
  for (const auto& x : t_obs) {
    if (!x) return std::nullopt;
    t = std::max(t, *x);
  }
  return t;
}

std::optional<double> SettlingReport::max_trk() const {
  if (t_trk.empty()) return std::nullopt;
  double t = 0.0;
  for (const auto& x : t_trk) {
    if (!x) return std::nullopt;
    t = std::max(t, *x);
  }
  return t;
}

namespace {

constexpr double kDivergenceNorm = 1e12;
constexpr double kFeedforwardTol = 1e-6;

/**
 * Stacked closed loop. State layout:
 * [eta0 | eta_1 q_1 v_1 | ... | eta_N q_N v_N] (q, v omitted observer-only).
 * Every follower reads only its in-neighbours' eta and its own q, v, eta.
 */
class ClosedLoop {
 public:
  ClosedLoop(const Scenario& s, bool observer_only)
      : s_(s),
        N_(s.graph.n_followers()),
        n_(s.leader.n()),
        m_(s.leader.m()),
        observer_only_(observer_only),
        block_(observer_only ? n_ : n_ + 2 * m_) {
    if (!observer_only_) {
      const RobustConfig rc = RobustConfig::from_bounds(s.bounds, s.controller.kappa);
      law_.emplace(s.controller.gains, s.controller.mode, rc, s.leader.E, s.leader.S,
                   s.controller.allow_uncertified, s.controller.u1_smooth_radius);
      for (const auto& p : s.agents) plants_.push_back(std::make_unique<TwoLinkArm>(p));
    }
  }

  Eigen::Index dim() const { return n_ + static_cast<Eigen::Index>(N_) * block_; }
  Eigen::Index eta_off(int i) const { return i == 0 ? 0 : n_ + (i - 1) * block_; }
  Eigen::Index q_off(int i) const { return eta_off(i) + n_; }
  Eigen::Index v_off(int i) const { return eta_off(i) + n_ + m_; }
  bool observer_only() const { return observer_only_; }
  const std::optional<ControlLaw>& law() const { return law_; }

  Eigen::VectorXd assemble(const InitialState& init) const {
    Eigen::VectorXd x(dim());
    x.segment(0, n_) = init.eta0;
    for (int i = 1; i <= N_; ++i) {
      x.segment(eta_off(i), n_) = init.eta[i - 1];
      if (!observer_only_) {
        x.segment(q_off(i), m_) = init.q[i - 1];
        x.segment(v_off(i), m_) = init.v[i - 1];
      }
    }
    return x;
  }

  Eigen::VectorXd agent_innovation(int i, const Eigen::VectorXd& x) const {
    const auto& in = s_.graph.in_neighbors(i);
    std::vector<NeighborEstimate> view;
    view.reserve(in.size());
    for (const auto& nb : in) view.push_back({nb.weight, x.segment(eta_off(nb.node), n_)});
    return innovation(x.segment(eta_off(i), n_), view);
  }

  Eigen::VectorXd stacked_innovation(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(static_cast<Eigen::Index>(N_) * n_);
    for (int i = 1; i <= N_; ++i) y.segment((i - 1) * n_, n_) = agent_innovation(i, x);
    return y;
  }

  Eigen::VectorXd operator()(double /*t*/, const Eigen::VectorXd& x) const {
    Eigen::VectorXd dx(x.size());
    dx.segment(0, n_) = s_.leader.S * x.segment(0, n_);
    for (int i = 1; i <= N_; ++i) {
      const Eigen::VectorXd eta_i = x.segment(eta_off(i), n_);
      const Eigen::VectorXd eta_dot = observer_rhs(eta_i, agent_innovation(i, x), s_.observer, s_.leader.S);
      dx.segment(eta_off(i), n_) = eta_dot;
      if (observer_only_) continue;
      const Eigen::VectorXd q = x.segment(q_off(i), m_);
      const Eigen::VectorXd v = x.segment(v_off(i), m_);
      const ControlOutput u = law_->compute(q, v, eta_i, eta_dot);
      dx.segment(q_off(i), m_) = v;
      dx.segment(v_off(i), m_) = manipulator_accel(*plants_[i - 1], q, v, u.tau);
    }
    return dx;
  }

 private:
  const Scenario& s_;
  int N_;
  int n_;
  int m_;
  bool observer_only_;
  Eigen::Index block_;
  std::optional<ControlLaw> law_;
  std::vector<std::unique_ptr<ElPlant>> plants_;
};

// Index of the last sample whose error was >= tol, -1 if none.
struct Watch {
  long last_violation = -1;
  void observe(long k, double err, double tol) {
    if (!(err < tol)) last_violation = k;
  }
  std::optional<double> settle(long last_index, double h) const {
    if (last_violation < 0) return 0.0;
    if (last_violation >= last_index) return std::nullopt;
    return static_cast<double>(last_violation + 1) * h;
  }
};

}  // namespace

RunResult run_closed_loop(const Scenario& s, const RunOptions& opt) {
  return run_closed_loop(s, draw_initial_state(s), opt);
}

RunResult run_closed_loop(const Scenario& s, const InitialState& init, const RunOptions& opt) {
  if (!has_root_spanning_tree(s.graph)) {
    throw AssumptionViolated("the leader does not reach every follower");
  }
  s.validate();
  RunResult r;
  r.seed = s.seed;
  r.network = analyze_network(s.graph, s.D_diag);
  const int N = s.graph.n_followers();
  const int n = s.leader.n();
  const int m = s.leader.m();
  r.observer_constants = observer_constants(s.observer, r.network.D, s.leader.S, n, N);

  const ClosedLoop sys(s, opt.observer_only);
  if (sys.law()) {
    r.ledger = sys.law()->ledger();
    r.robust = sys.law()->robust();
  } else {
    r.ledger = make_ledger(s.controller.gains, s.controller.mode);
    r.robust = RobustConfig::from_bounds(s.bounds, s.controller.kappa);
  }

  const double h = s.integrator.step;
  const long K = std::lround(s.integrator.horizon / h);
  const int stride = s.integrator.record_every;
  const double tol = s.tolerance;
  const Eigen::MatrixXd& S = s.leader.S;
  const Eigen::MatrixXd& E = s.leader.E;
  const Eigen::MatrixXd ES = E * S;
  const Eigen::MatrixXd ESS = ES * S;

  std::vector<Watch> obs_watch(N), trk_watch(N);
  Watch ff_watch;
  std::vector<double> V_full;
  V_full.reserve(K + 1);
  std::vector<double> obs_err_max(N, 0.0);  // filled after settling is known
  std::vector<std::vector<float>> obs_hist(N), trk_hist(N);

  Trajectory& traj = r.trajectory;
  traj.has_plants = !opt.observer_only;
  traj.agents.resize(N);

  Eigen::VectorXd x = sys.assemble(init);
  const Eigen::VectorXd y0 = sys.stacked_innovation(x);

  for (long k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) * h;
    if (k > 0) {
      try {
        x = rk4_step(sys, x, t - h, h);
      } catch (const NonFiniteState& e) {
        throw Divergence(e.what());
      }
      if (x.lpNorm<Eigen::Infinity>() > kDivergenceNorm) {
        throw Divergence("state norm exceeded 1e12 at t = " + std::to_string(t));
      }
    }
    const Eigen::VectorXd eta0 = x.segment(0, n);
    const Eigen::VectorXd q0 = E * eta0;
    const Eigen::VectorXd qd0 = ES * eta0;
    const Eigen::VectorXd y = sys.stacked_innovation(x);
    V_full.push_back(lyapunov_V(y, s.observer, r.network.D));

    double ff = 0.0;
    const bool record = opt.keep_trajectory && (k % stride == 0 || k == K);
    if (record) {
      traj.times.push_back(t);
      traj.V.push_back(V_full.back());
    }
    for (int i = 1; i <= N; ++i) {
      const Eigen::VectorXd eta_err = x.segment(sys.eta_off(i), n) - eta0;
      const double oe = eta_err.lpNorm<Eigen::Infinity>();
      obs_watch[i - 1].observe(k, oe, tol);
      obs_hist[i - 1].push_back(static_cast<float>(oe));
      ff = std::max(ff, (ESS * eta_err).norm());
      AgentSeries& series = traj.agents[i - 1];
      if (record) series.eta_err.push_back(eta_err);
      if (opt.observer_only) continue;
      const Eigen::VectorXd q_err = x.segment(sys.q_off(i), m) - q0;
      const Eigen::VectorXd v_err = x.segment(sys.v_off(i), m) - qd0;
      const double te = std::max(q_err.lpNorm<Eigen::Infinity>(), v_err.lpNorm<Eigen::Infinity>());
      trk_watch[i - 1].observe(k, te, tol);
      trk_hist[i - 1].push_back(static_cast<float>(te));
      if (record) {
        series.q_err.push_back(q_err);
        series.v_err.push_back(v_err);
      }
    }
    ff_watch.observe(k, ff, kFeedforwardTol);
    if (k == K) r.report.max_feedforward_error_final = ff;
  }

  SettlingReport& rep = r.report;
  rep.T1_star = r.observer_constants.T1_star;
  double bound = rep.T1_star;
  if (!s.observer.fixed_time()) {
    rep.T1_finite = finite_time_bound(r.observer_constants, s.observer, r.network.D, y0);
    bound = *rep.T1_finite;
  }
  rep.bound_respected = true;
  for (int i = 0; i < N; ++i) {
    rep.t_obs.push_back(obs_watch[i].settle(K, h));
    if (!rep.t_obs.back() || *rep.t_obs.back() > bound) rep.bound_respected = false;
    if (!opt.observer_only) rep.t_trk.push_back(trk_watch[i].settle(K, h));
  }
  rep.feedforward_exact_time = ff_watch.settle(K, h);

  auto post_max = [&](const std::vector<float>& hist, const std::optional<double>& t_settle) {
    if (!t_settle) return 0.0;
    const long start = std::lround(*t_settle / h);
    double worst = 0.0;
    for (long k = start; k < static_cast<long>(hist.size()); ++k) worst = std::max(worst, double(hist[k]));
    return worst;
  };
  for (int i = 0; i < N; ++i) {
    rep.max_post_settling_error = std::max(rep.max_post_settling_error, post_max(obs_hist[i], rep.t_obs[i]));
    if (!opt.observer_only) {
      rep.max_post_settling_error = std::max(rep.max_post_settling_error, post_max(trk_hist[i], rep.t_trk[i]));
    }
  }

  rep.V_initial = V_full.front();
  rep.V_max = *std::max_element(V_full.begin(), V_full.end());
  const auto settled = rep.max_obs();
  const long settle_idx = settled ? std::lround(*settled / h) : K;
  rep.V_max_increase = -std::numeric_limits<double>::infinity();
  for (long k = 0; k < settle_idx && k < K; ++k) {
    rep.V_max_increase = std::max(rep.V_max_increase, V_full[k + 1] - V_full[k]);
  }
  if (settle_idx == 0) rep.V_max_increase = 0.0;
  rep.lyapunov_monotone = rep.V_max_increase <= 1e-9 * rep.V_max;
  return r;
}

std::optional<double> settling_time(const std::vector<double>& times, const std::vector<double>& err,
                                    double tol) {
  if (times.empty() || times.size() != err.size()) throw DimensionMismatch("times and errors differ");
  long last = -1;
  for (std::size_t k = 0; k < err.size(); ++k) {
    if (!(err[k] < tol)) last = static_cast<long>(k);
  }
  if (last < 0) return times.front();
  if (last + 1 >= static_cast<long>(times.size())) return std::nullopt;
  return times[last + 1];
}

std::vector<std::optional<double>> detect_settling(const Trajectory& traj, double tol, ErrorKind which) {
  if (traj.times.empty()) throw DimensionMismatch("empty trajectory");
  std::vector<std::optional<double>> out;
  for (const auto& a : traj.agents) {
    std::vector<double> err(traj.times.size(), 0.0);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      if (which == ErrorKind::observer) {
        err[k] = a.eta_err.at(k).lpNorm<Eigen::Infinity>();
      } else {
        err[k] = std::max(a.q_err.at(k).lpNorm<Eigen::Infinity>(), a.v_err.at(k).lpNorm<Eigen::Infinity>());
      }
    }
    out.push_back(settling_time(traj.times, err, tol));
  }
  return out;
}

namespace {

void put(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,agent";
  const Eigen::Index m = traj.agents.empty() || traj.agents[0].q_err.empty() ? 2 : traj.agents[0].q_err[0].size();
  const Eigen::Index n = traj.agents.empty() || traj.agents[0].eta_err.empty() ? 2 : traj.agents[0].eta_err[0].size();
  for (Eigen::Index k = 1; k <= m; ++k) out += ",q" + std::to_string(k) + "_err";
  for (Eigen::Index k = 1; k <= m; ++k) out += ",v" + std::to_string(k) + "_err";
  for (Eigen::Index k = 1; k <= n; ++k) out += ",eta" + std::to_string(k) + "_err";
  out += ",V\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    for (std::size_t i = 0; i < traj.agents.size(); ++i) {
      const AgentSeries& a = traj.agents[i];
      put(out, traj.times[k]);
      out += ',' + std::to_string(i + 1);
      for (Eigen::Index c = 0; c < m; ++c) {
        out += ',';
        if (traj.has_plants) put(out, a.q_err[k][c]);
      }
      for (Eigen::Index c = 0; c < m; ++c) {
        out += ',';
        if (traj.has_plants) put(out, a.v_err[k][c]);
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        out += ',';
        put(out, a.eta_err[k][c]);
      }
      out += ',';
      put(out, traj.V[k]);
      out += '\n';
    }
  }
  return out;
}

std::string gnuplot_script(const RunResult& r, const std::string& csv_name) {
  std::ostringstream g;
  const int N = static_cast<int>(r.trajectory.agents.size());
  g << "# Observer and tracking errors; dashed lines mark observer settling.\n"
    << "set datafile separator ','\n"
    << "set key outside right\n"
    << "set xlabel 't [s]'\n"
    << "set terminal pngcairo size 1200,1400\n"
    << "set output 'errors.png'\n"
    << "set multiplot layout 3,1\n";
  auto vlines = [&] {
    int tag = 1;
    for (const auto& t : r.report.t_obs) {
      if (t) g << "set arrow " << tag++ << " from " << *t << ", graph 0 to " << *t
               << ", graph 1 nohead dashtype 2 lc rgb 'gray'\n";
    }
    if (std::isfinite(r.report.T1_star) && !r.trajectory.times.empty() &&
        r.report.T1_star <= r.trajectory.times.back()) {
      g << "set arrow " << tag << " from " << r.report.T1_star << ", graph 0 to " << r.report.T1_star
        << ", graph 1 nohead lc rgb 'red'\n";
    }
  };
  auto panel = [&](const std::string& title, int first_col, int cols) {
    g << "set title '" << title << "'\n";
    vlines();
    g << "plot ";
    bool first = true;
    for (int i = 1; i <= N; ++i) {
      for (int c = 0; c < cols; ++c) {
        if (!first) g << ", \\\n     ";
        first = false;
        g << "'" << csv_name << "' using 1:($2==" << i << " ? $" << first_col + c
          << " : 1/0) with lines title 'agent " << i << " [" << c + 1 << "]'";
      }
    }
    g << "\nunset arrow\n";
  };
  const int m = 2;
  const int n = r.trajectory.agents.empty() || r.trajectory.agents[0].eta_err.empty()
                    ? 2
                    : static_cast<int>(r.trajectory.agents[0].eta_err[0].size());
  panel("eta_i - eta_0", 3 + 2 * m, n);
  if (r.trajectory.has_plants) {
    panel("q_i - q_0", 3, m);
    panel("qdot_i - qdot_0", 3 + m, m);
  }
  g << "unset multiplot\n";
  return g.str();
}

}  // namespace lagsync
