#include <benchmark/benchmark.h>

#include "lagsync/simulation.hpp"

using namespace lagsync;

static void BM_ObserverRhs(benchmark::State& state) {
  const ObserverGains gains;
  Eigen::Matrix2d S;
  S << 0, 1, -1, 0;
  const Eigen::VectorXd eta = Eigen::Vector2d(0.3, -1.2);
  const Eigen::VectorXd y = Eigen::Vector2d(0.05, 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(observer_rhs(eta, y, gains, S));
}
BENCHMARK(BM_ObserverRhs);

static void BM_ControlLaw(benchmark::State& state) {
  const Scenario s = example_scenario();
  const ControlLaw law(s.controller.gains, s.controller.mode,
                       RobustConfig::from_bounds(s.bounds, s.controller.kappa), s.leader.E, s.leader.S, true);
  const Eigen::VectorXd q = Eigen::Vector2d(0.4, -0.2), v = Eigen::Vector2d(0.1, 0.3);
  const Eigen::VectorXd eta = Eigen::Vector2d(1.0, 0.1), eta_dot = Eigen::Vector2d(0.1, -1.0);
  for (auto _ : state) benchmark::DoNotOptimize(law.compute(q, v, eta, eta_dot));
}
BENCHMARK(BM_ControlLaw);

static void BM_Rk4Leader(benchmark::State& state) {
  Eigen::Matrix2d S;
  S << 0, 1, -1, 0;
  auto f = [&](double, const Eigen::VectorXd& x) -> Eigen::VectorXd { return S * x; };
  Eigen::VectorXd x = Eigen::Vector2d(1.0, 0.0);
  for (auto _ : state) {
    x = rk4_step(f, x, 0.0, 1e-4);
    benchmark::DoNotOptimize(x);
  }
}
BENCHMARK(BM_Rk4Leader);

static void BM_ClosedLoopTenthSecond(benchmark::State& state) {
  Scenario s = example_scenario();
  s.integrator.horizon = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(run_closed_loop(s, RunOptions{false, false}).report.V_max);
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_ClosedLoopTenthSecond)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
