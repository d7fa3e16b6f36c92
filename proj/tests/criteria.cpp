#include "criteria.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <unistd.h>

#include "../tools/cli.hpp"
#include "gen.hpp"
#include "lagsync/controller.hpp"
#include "lagsync/numerics.hpp"

namespace criteria {

using namespace lagsync;

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

std::string opt_fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string("never"); }

}  // namespace

Result example_reproduction(const RunResult& r, double wall_seconds) {
  const auto& rep = r.report;
  bool obs_ok = !rep.t_obs.empty();
  for (const auto& t : rep.t_obs) obs_ok = obs_ok && t && *t < rep.T1_star;
  bool trk_ok = !rep.t_trk.empty();
  int trk_settled = 0;
  for (const auto& t : rep.t_trk) {
    trk_ok = trk_ok && t.has_value();
    trk_settled += t.has_value();
  }
  const bool time_ok = wall_seconds <= 120.0;
  Result res;
  res.pass = obs_ok && trk_ok && time_ok;
  res.detail = "max t_obs " + opt_fmt(rep.max_obs()) + " s vs T1* " + fmt(rep.T1_star) + " s; tracking settled " +
               std::to_string(trk_settled) + "/" + std::to_string(rep.t_trk.size()) +
               " (largest post-settling error " + fmt(rep.max_post_settling_error) + "); wall " +
               fmt(wall_seconds) + " s";
  return res;
}

Result fixed_time_property(const MonteCarloReport& fixed, const MonteCarloReport& finite) {
  const bool no_violation = fixed.violations == 0 && fixed.unsettled == 0;
  const bool spread_ok = fixed.spread_ratio < 2.0;
  const bool finite_grows = finite.spearman_scale > 0.9;
  Result res;
  res.pass = no_violation && spread_ok && finite_grows;
  res.detail = std::to_string(fixed.violations) + " violations; fixed settle " + fmt(fixed.min_settle) + ".." +
               fmt(fixed.max_settle) + " s (spread " + fmt(fixed.spread_ratio) + "); finite Spearman " +
               fmt(finite.spearman_scale);
  return res;
}

Result domination(int draws, std::uint64_t seed, std::optional<BoundsSpec> bounds, std::optional<double> kappa) {
  const ThetaRanges ranges = default_theta_ranges();
  const BoundsSpec env = bounds ? *bounds : derive_bounds(ranges, CertificationGrid{}, 0.01);
  gen::Gen g(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < draws; ++k) {
    ManipulatorParams p;
    for (int j = 0; j < 6; ++j) p.theta[j] = g.uniform(ranges[j].first, ranges[j].second);
    const TwoLinkArm arm(p);
    const RobustConfig rc = RobustConfig::from_bounds(env, kappa ? *kappa : g.uniform(1.0, 4.0));
    const Eigen::VectorXd q = g.vector(2, std::numbers::pi);
    const Eigen::VectorXd v = g.vector(2, g.log_uniform(1e-3, 10.0));
    const Eigen::VectorXd u2v = g.vector(2, g.log_uniform(1e-3, 100.0));
    const Eigen::VectorXd zeta = g.vector(2, g.log_uniform(1e-6, 10.0));
    const Eigen::VectorXd u1v = u1(zeta, u2v, v, rc);
    worst = std::max(worst, domination_slack(q, v, zeta, u1v, u2v, arm, rc));
  }
  return {worst <= 1e-9, "max slack " + fmt(worst) + " over " + std::to_string(draws) + " draws"};
}

Result inequality_oracles(int draws, std::uint64_t seed) {
  gen::Gen g(seed);
  double ps = std::numeric_limits<double>::infinity(), pd = ps, yg = ps;
  for (int k = 0; k < draws; ++k) {
    std::vector<double> xs(g.integer(1, 12));
    for (auto& x : xs) x = g.signed_magnitude(1e-3, 10.0);
    const auto [lo, hi] = oracle_power_sum(xs, g.log_uniform(0.05, 5.0));
    ps = std::min({ps, lo, hi});

    const OddRational p = g.odd_ratio(0.0, 1.0 + 1e-12);
    pd = std::min(pd, oracle_odd_power_difference(g.signed_magnitude(1e-3, 10.0), g.signed_magnitude(1e-3, 10.0), p));

    yg = std::min(yg, oracle_young(g.signed_magnitude(1e-3, 10.0), g.signed_magnitude(1e-3, 10.0),
                                   g.log_uniform(0.1, 5.0), g.log_uniform(0.1, 5.0), g.log_uniform(0.1, 10.0)));
  }
  const double worst = std::min({ps, pd, yg});
  return {worst >= -1e-12, "min slack: power sum " + fmt(ps) + ", odd difference " + fmt(pd) + ", Young " + fmt(yg)};
}

Result scaling_matrix(int graphs, std::uint64_t seed) {
  gen::Gen g(seed);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  int failures = 0;
  for (int k = 0; k < graphs; ++k) {
    const Digraph dg = g.rooted_digraph(g.integer(1, 10));
    const Eigen::MatrixXd H = laplacian(dg);
    try {
      const double m = scaled_min_eig(H, compute_scaling_D(H));
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    } catch (const Error&) {
      ++failures;
    }
  }
  const bool pass = failures == 0 && lo >= 2.0 - 1e-9 && hi <= 2.0 + 1e-6;
  return {pass, "min eig in [" + fmt(lo - 2.0) + ", " + fmt(hi - 2.0) + "] + 2; " + std::to_string(failures) +
                    " failures"};
}

Result lyapunov(const RunResult& r) {
  const auto& rep = r.report;
  return {rep.lyapunov_monotone,
          "largest step increase " + fmt(rep.V_max_increase) + " vs allowance " + fmt(1e-9 * rep.V_max)};
}

Result ledger() {
  const GainLedger l = build_ledger(OddRational(7, 9), OddRational(9, 7), 0.05);
  const SlackRecord s = check_gains(l.gains());
  double min_slack = std::numeric_limits<double>::infinity();
  for (const auto& e : s.entries) min_slack = std::min(min_slack, e.slack);
  const bool exact = l.p[1] == Rational(32, 63) && l.p[3] == Rational(32, 49);
  const Rational a(7, 9), b(9, 7);
  const bool closed_ok = b - a == Rational(32, 63) && b / a - Rational(1) == Rational(32, 49);
  return {s.certified && min_slack > 0.0 && exact && closed_ok,
          "min slack " + fmt(min_slack) + "; p2 = " + l.p[1].to_string() + ", p4 = " + l.p[3].to_string()};
}

Result integrator_order() {
  Eigen::Matrix2d S;
  S << 0, 1, -1, 0;
  const Eigen::VectorXd x0 = Eigen::Vector2d(1.0, 0.0);
  auto f = [&](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return S * x; };
  auto err = [&](int steps) {
    const double h = 2.0 * std::numbers::pi / steps;
    Eigen::VectorXd x = x0;
    for (int k = 0; k < steps; ++k) x = rk4_step(f, x, k * h, h);
    return (x - x0).norm();
  };
  const double ratio = err(100) / err(200);
  return {std::abs(ratio - 16.0) <= 2.0, "error ratio " + fmt(ratio)};
}

Result determinism(double horizon) {
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / ("lagsync_det_" + std::to_string(::getpid()));
  std::string csv[2];
  int codes[2];
  const std::string hz = std::to_string(horizon);
  for (int k = 0; k < 2; ++k) {
    const std::string dir = (base / std::to_string(k)).string();
    const char* argv[] = {"lagsync", "simulate", "--seed", "7", "--horizon", hz.c_str(), "--out", dir.c_str()};
    std::ostringstream out, err;
    codes[k] = cli::dispatch(8, argv, out, err);
    std::ifstream in(fs::path(dir) / "trajectory.csv", std::ios::binary);
    csv[k].assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::error_code ec;
  fs::remove_all(base, ec);
  const bool pass = !csv[0].empty() && csv[0] == csv[1] && codes[0] == codes[1];
  return {pass, std::to_string(csv[0].size()) + " bytes, " + (csv[0] == csv[1] ? "identical" : "different")};
}

}  // namespace criteria
