#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lagsync/config.hpp"
#include "lagsync/error.hpp"
#include "lagsync/simulation.hpp"

namespace lagsync::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string scenario = "paper_example";
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  bool allow_uncertified = false;
  std::optional<double> h;
  std::optional<double> horizon;
  std::optional<double> smooth;
  // montecarlo
  int runs = 20;
  std::string scale = "1e-2:1e2";
  bool full = false;
  // certify-gains
  std::optional<double> gamma1, gamma2, k1, k2;
  std::optional<double> margin;
  // certify-bounds
  bool derive = false;
  int q_points = 73;
  double v_max = 5.0;
};

json opt_time(const std::optional<double>& t) { return t ? json(*t) : json(nullptr); }

json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

json to_json(const GainLedger& l) {
  json p = json::array();
  for (const Rational& r : l.p) p.push_back(r.to_string());
  json slack = json::array();
  for (const GainSlack& s : l.slack.entries) {
    slack.push_back({{"name", s.name}, {"value", s.value}, {"bound", s.bound}, {"slack", s.slack}});
  }
  return {{"mode", to_string(l.mode)},
          {"alpha", l.alpha.to_string()},
          {"beta", l.beta.to_string()},
          {"p", p},
          {"L1", l.L1},
          {"gamma1", l.gamma1},
          {"gamma2", l.gamma2},
          {"lambda", json(std::vector<double>(l.lambda.begin(), l.lambda.end()))},
          {"L2", l.L2},
          {"k1", l.k1},
          {"k2", l.k2},
          {"margin", l.margin},
          {"slack", slack},
          {"certified", l.certified}};
}

json to_json(const ObserverConstants& k) {
  return {{"c_hat1", k.c_hat1}, {"c_hat2", k.c_hat2}, {"c_hat3", k.c_hat3},   {"T1_star", k.T1_star},
          {"d_max", k.d_max},   {"ds_norm", k.ds_norm}, {"fixed_time", k.fixed_time}};
}

json to_json(const LaplacianBundle& b) {
  return {{"H", to_json(b.H)},
          {"D", to_json(b.D)},
          {"min_eig", b.min_eig},
          {"root_reachable", b.root_reachable},
          {"D_user_supplied", b.D_user_supplied},
          {"D_verified", b.D_verified}};
}

json to_json(const BoundsSpec& b) {
  return {{"km_inv", b.km_inv}, {"kM_inv", b.kM_inv}, {"kc", b.kc}, {"kg", b.kg}};
}

json to_json(const BoundsCertificate& c) {
  return {{"km_inv", c.km_inv},
          {"kM_inv", c.kM_inv},
          {"kc", c.kc},
          {"kg", c.kg},
          {"samples_checked", c.samples_checked},
          {"max_violation", c.max_violation},
          {"passed", c.passed},
          {"witness", c.witness},
          {"min_eig_M", c.min_eig_M},
          {"max_eig_M", c.max_eig_M},
          {"max_coriolis_ratio", c.max_coriolis_ratio},
          {"max_gravity", c.max_gravity},
          {"v_max", c.v_max}};
}

json to_json(const SettlingReport& r) {
  json obs = json::array(), trk = json::array();
  for (const auto& t : r.t_obs) obs.push_back(opt_time(t));
  for (const auto& t : r.t_trk) trk.push_back(opt_time(t));
  return {{"t_obs", obs},
          {"t_trk", trk},
          {"max_t_obs", opt_time(r.max_obs())},
          {"max_t_trk", opt_time(r.max_trk())},
          {"T1_star", r.T1_star},
          {"T1_finite", opt_time(r.T1_finite)},
          {"bound_respected", r.bound_respected},
          {"max_post_settling_error", r.max_post_settling_error},
          {"V_initial", r.V_initial},
          {"V_max", r.V_max},
          {"V_max_increase", r.V_max_increase},
          {"lyapunov_monotone", r.lyapunov_monotone},
          {"feedforward_exact_time", opt_time(r.feedforward_exact_time)},
          {"max_feedforward_error_final", r.max_feedforward_error_final}};
}

Scenario load(const Options& o) {
  Scenario s = load_scenario(o.scenario);
  if (o.mode) s.apply_mode(parse_control_mode(*o.mode));
  if (o.seed) s.seed = *o.seed;
  if (o.allow_uncertified) s.controller.allow_uncertified = true;
  if (o.h) s.integrator.step = *o.h;
  if (o.horizon) s.integrator.horizon = *o.horizon;
  if (o.smooth) s.controller.u1_smooth_radius = *o.smooth;
  s.validate();
  return s;
}

void write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw ValidationError("--out", "cannot write " + (dir / name).string());
  f << text;
}

fs::path prepare_out(const std::string& out) {
  const fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("--out", "cannot create directory '" + out + "': " + ec.message());
  return dir;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  const Scenario s = load(o);
  const auto start = std::chrono::steady_clock::now();
  const RunResult r = run_closed_loop(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json report = {{"scenario", s.name},
                 {"seed", s.seed},
                 {"mode", to_string(s.controller.mode)},
                 {"step", s.integrator.step},
                 {"horizon", s.integrator.horizon},
                 {"tolerance", s.tolerance},
                 {"network", to_json(r.network)},
                 {"observer", to_json(r.observer_constants)},
                 {"ledger", to_json(r.ledger)},
                 {"robust", {{"kappa", r.robust.kappa}, {"epsilon", r.robust.epsilon}, {"M_hat", r.robust.M_hat}}},
                 {"settling", to_json(r.report)}};
  if (!o.out.empty()) {
    const fs::path dir = prepare_out(o.out);
    write_file(dir, "trajectory.csv", trajectory_csv(r.trajectory));
    write_file(dir, "report.json", report.dump(2) + "\n");
    write_file(dir, "plot.gp", gnuplot_script(r, "trajectory.csv"));
  }
  out << report.dump(2) << '\n';
  err << "simulated " << s.integrator.horizon << " s in " << secs << " s\n";
  if (!r.network.D_verified) err << "warning: supplied D fails min-eig(H^T D + D H) >= 2\n";
  if (!r.report.bound_respected) {
    err << "observer settling exceeded its bound\n";
    return kBoundViolation;
  }
  return kOk;
}

std::pair<double, double> parse_scale(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ValidationError("--scale", "expected lo:hi");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw ValidationError("--scale", "expected two numbers lo:hi");
  }
}

int cmd_montecarlo(const Options& o, std::ostream& out, std::ostream&) {
  const Scenario s = load(o);
  MonteCarloOptions mc;
  mc.runs = o.runs;
  std::tie(mc.scale_lo, mc.scale_hi) = parse_scale(o.scale);
  if (!(mc.scale_lo > 0.0) || mc.scale_hi < mc.scale_lo) {
    throw ValidationError("--scale", "needs 0 < lo <= hi");
  }
  mc.observer_only = !o.full;
  const MonteCarloReport rep = monte_carlo(s, mc);
  json runs = json::array();
  for (const auto& r : rep.runs) {
    runs.push_back({{"index", r.index},
                    {"scale", r.scale},
                    {"obs_settle", opt_time(r.obs_settle)},
                    {"trk_settle", opt_time(r.trk_settle)},
                    {"bound", r.bound},
                    {"violation", r.violation}});
  }
  const json report = {{"scenario", s.name},
                       {"seed", s.seed},
                       {"mode", to_string(rep.mode)},
                       {"observer_only", mc.observer_only},
                       {"T1_star", rep.T1_star},
                       {"violations", rep.violations},
                       {"unsettled", rep.unsettled},
                       {"min_settle", rep.min_settle},
                       {"max_settle", rep.max_settle},
                       {"median_settle", rep.median_settle},
                       {"spread_ratio", rep.spread_ratio},
                       {"spearman_scale", rep.spearman_scale},
                       {"runs", runs}};
  if (!o.out.empty()) write_file(prepare_out(o.out), "montecarlo.json", report.dump(2) + "\n");
  out << report.dump(2) << '\n';
  return rep.violations > 0 ? kBoundViolation : kOk;
}

int cmd_certify_gains(const Options& o, std::ostream& out, std::ostream&) {
  const Scenario s = load(o);
  GainLedger ledger;
  if (o.margin) {
    ledger = build_ledger(s.controller.gains.alpha, s.controller.gains.beta, *o.margin, s.controller.mode);
  } else {
    ControllerGains g = s.controller.gains;
    if (o.gamma1) g.gamma1 = *o.gamma1;
    if (o.gamma2) g.gamma2 = *o.gamma2;
    if (o.k1) g.k1 = *o.k1;
    if (o.k2) g.k2 = *o.k2;
    ledger = make_ledger(g, s.controller.mode);
  }
  const json j = to_json(ledger);
  if (!o.out.empty()) write_file(prepare_out(o.out), "ledger.json", j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return ledger.certified ? kOk : kBoundViolation;
}

int cmd_observer_bound(const Options& o, std::ostream& out, std::ostream&) {
  const Scenario s = load(o);
  const LaplacianBundle net = analyze_network(s.graph, s.D_diag);
  const ObserverConstants k = observer_constants(s.observer, net.D, s.leader.S, s.leader.n(), s.graph.n_followers());
  json j = to_json(k);
  j["network"] = to_json(net);
  if (!o.out.empty()) write_file(prepare_out(o.out), "observer_bound.json", j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return kOk;
}

int cmd_certify_bounds(const Options& o, std::ostream& out, std::ostream&) {
  const Scenario s = load(o);
  CertificationGrid grid;
  grid.q_points = o.q_points;
  grid.v_max = o.v_max;
  grid.gravity = s.agents.empty() ? 9.8 : s.agents.front().gravity;
  if (grid.q_points < 2) throw ValidationError("--q-points", "must be >= 2");
  const BoundsCertificate c = evaluate_bounds(s.theta_ranges, s.bounds, grid);
  json j = to_json(c);
  json ranges = json::array();
  for (const auto& [lo, hi] : s.theta_ranges) ranges.push_back({lo, hi});
  j["theta_ranges"] = ranges;
  if (o.derive) j["derived"] = to_json(derive_bounds(s.theta_ranges, grid));
  if (!o.out.empty()) write_file(prepare_out(o.out), "bounds.json", j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return c.passed ? kOk : kBoundViolation;
}

void common_flags(CLI::App* app, Options& o) {
  app->add_option("--scenario", o.scenario, "Bundled scenario name or config path")->capture_default_str();
  app->add_option("--out", o.out, "Output directory (files are written only here)");
  app->add_option("--seed", o.seed, "Override the scenario seed");
  app->add_option("--mode", o.mode, "fixed | finite")->check(CLI::IsMember({"fixed", "finite"}));
  app->add_flag("--allow-uncertified", o.allow_uncertified, "Run gains that fail the selection inequalities");
  app->add_option("--h", o.h, "Integration step [s]")->check(CLI::PositiveNumber);
  app->add_option("--horizon", o.horizon, "Simulated time [s]")->check(CLI::PositiveNumber);
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed fixed-time observer and synchronization controller for networked manipulators",
               "lagsync"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Closed-loop run: report.json, trajectory.csv, plot.gp");
  common_flags(sim, o);
  sim->add_option("--u1-smooth-radius", o.smooth, "Boundary layer of the domination term")
      ->check(CLI::NonNegativeNumber);

  auto* mc = app.add_subcommand("montecarlo", "Settling times over log-uniform initial scales");
  common_flags(mc, o);
  mc->add_option("--runs", o.runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  mc->add_option("--scale", o.scale, "Range of ||eta_bar(0)||, lo:hi")->capture_default_str();
  mc->add_flag("--full", o.full, "Integrate plants too (default: observers only)");

  auto* cg = app.add_subcommand("certify-gains", "Gain ledger and slack of every selection inequality");
  common_flags(cg, o);
  cg->add_option("--gamma1", o.gamma1);
  cg->add_option("--gamma2", o.gamma2);
  cg->add_option("--k1", o.k1);
  cg->add_option("--k2", o.k2);
  cg->add_option("--build-margin", o.margin, "Build gains this far above their lower bounds")
      ->check(CLI::PositiveNumber);

  auto* ob = app.add_subcommand("observer-bound", "Observer constants and settling bound T1*");
  common_flags(ob, o);

  auto* cb = app.add_subcommand("certify-bounds", "Grid check of the inertia, Coriolis and gravity bounds");
  common_flags(cb, o);
  cb->add_flag("--derive", o.derive, "Also report the tightest constants the grid supports");
  cb->add_option("--q-points", o.q_points, "Grid points per joint")->capture_default_str();
  cb->add_option("--v-max", o.v_max, "Velocity ball reported with kc")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kValidation;
  }

  try {
    if (*sim) return cmd_simulate(o, out, err);
    if (*mc) return cmd_montecarlo(o, out, err);
    if (*cg) return cmd_certify_gains(o, out, err);
    if (*ob) return cmd_observer_bound(o, out, err);
    if (*cb) return cmd_certify_bounds(o, out, err);
  } catch (const Divergence& e) {
    err << e.what() << '\n';
    return kDivergence;
  } catch (const NonFiniteState& e) {
    err << e.what() << '\n';
    return kDivergence;
  } catch (const BoundViolated& e) {
    err << e.what() << "\nwitness: " << e.witness() << '\n';
    return kBoundViolation;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

int dispatch(int argc, char** argv) { return dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace lagsync::cli
