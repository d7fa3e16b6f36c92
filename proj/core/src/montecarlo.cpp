#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "lagsync/simulation.hpp"
#include "sampling.hpp"

namespace lagsync {

unsigned default_thread_count() {
  if (const char* env = std::getenv("LAGSYNC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

std::vector<double> ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

// Initial condition of run k: eta_i(0) - eta0 along a random direction of
// the stacked space, scaled so that ||eta_bar(0)|| equals the drawn scale.
InitialState mc_initial(const Scenario& s, const MonteCarloOptions& opt, int k, double& scale) {
  detail::Rng rng(detail::mix_seed(s.seed, static_cast<std::uint64_t>(k)));
  const double u = rng.uniform();
  scale = opt.scale_lo * std::pow(opt.scale_hi / opt.scale_lo, u);
  InitialState init = draw_initial_state(s, detail::mix_seed(s.seed ^ 0x5bd1e995ULL, k));
  const int N = s.graph.n_followers();
  const int n = s.leader.n();
  Eigen::VectorXd dir(static_cast<Eigen::Index>(N) * n);
  do {
    for (Eigen::Index c = 0; c < dir.size(); ++c) dir[c] = rng.symmetric();
  } while (dir.norm() < 1e-3);
  dir *= scale / dir.norm();
  for (int i = 0; i < N; ++i) init.eta[i] = init.eta0 + dir.segment(i * n, n);
  return init;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DimensionMismatch("spearman needs two equal series of length >= 2");
  const std::vector<double> rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

MonteCarloReport monte_carlo(const Scenario& s, const MonteCarloOptions& opt) {
  if (opt.runs < 1) throw Error("monte_carlo: runs must be >= 1");
  if (!(opt.scale_lo > 0.0) || opt.scale_hi < opt.scale_lo) {
    throw Error("monte_carlo: scale range must satisfy 0 < lo <= hi");
  }
  s.validate();
  MonteCarloReport rep;
  rep.mode = s.controller.mode;
  rep.runs.resize(opt.runs);
  std::vector<std::exception_ptr> failures(opt.runs);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < opt.runs; k = next++) {
      try {
        double scale = 0.0;
        const InitialState init = mc_initial(s, opt, k, scale);
        const RunResult r = run_closed_loop(s, init, {opt.observer_only, false});
        MonteCarloRun& out = rep.runs[k];
        out.index = k;
        out.scale = scale;
        out.obs_settle = r.report.max_obs();
        out.trk_settle = r.report.max_trk();
        out.bound = r.report.T1_finite ? *r.report.T1_finite : r.report.T1_star;
        out.violation = !out.obs_settle || *out.obs_settle > out.bound;
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  const unsigned threads = std::min<unsigned>(opt.threads ? opt.threads : default_thread_count(), opt.runs);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int k = 0; k < opt.runs; ++k) {
    if (!failures[k]) continue;
    const std::string tag = "run " + std::to_string(k) + ": ";
    try {
      std::rethrow_exception(failures[k]);
    } catch (const Divergence& e) {
      throw Divergence(tag + e.what());
    } catch (const std::exception& e) {
      throw Error(tag + e.what());
    }
  }

  std::vector<double> settle, scale;
  for (const auto& r : rep.runs) {
    if (r.violation) ++rep.violations;
    if (!r.obs_settle) {
      ++rep.unsettled;
      continue;
    }
    settle.push_back(*r.obs_settle);
    scale.push_back(r.scale);
  }
  rep.T1_star = s.observer.fixed_time() ? rep.runs.front().bound : std::numeric_limits<double>::infinity();
  if (!settle.empty()) {
    std::vector<double> sorted = settle;
    std::sort(sorted.begin(), sorted.end());
    rep.min_settle = sorted.front();
    rep.max_settle = sorted.back();
    const std::size_t m = sorted.size();
    rep.median_settle = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
    rep.spread_ratio = rep.min_settle > 0.0 ? rep.max_settle / rep.min_settle
                                            : std::numeric_limits<double>::infinity();
  }
  if (settle.size() >= 2) rep.spearman_scale = spearman(scale, settle);
  return rep;
}

}  // namespace lagsync
