#pragma once

// Acceptance checks shared by the unit tests and the acceptance binary.

#include <optional>
#include <string>

#include "lagsync/simulation.hpp"

namespace criteria {

struct Result {
  bool pass = false;
  std::string detail;
};

/// Bundled scenario at h = 1e-4: observers settle before T1*, tracking
/// settles within the horizon, wall time within two minutes.
Result example_reproduction(const lagsync::RunResult& r, double wall_seconds);

/// Fixed design: no bound violations, settle spread < 2. Finite design:
/// Spearman(settle, scale) > 0.9 on the same draws.
Result fixed_time_property(const lagsync::MonteCarloReport& fixed, const lagsync::MonteCarloReport& finite);

/// Domination slack over random draws inside the derived envelope.
Result domination(int draws, std::uint64_t seed, std::optional<lagsync::BoundsSpec> bounds = std::nullopt,
                  std::optional<double> kappa = std::nullopt);

/// Power-sum, odd-power-difference and Young inequalities.
Result inequality_oracles(int draws, std::uint64_t seed);

/// Scaling matrix on random rooted digraphs.
Result scaling_matrix(int graphs, std::uint64_t seed);

/// V non-increasing until the observers settle.
Result lyapunov(const lagsync::RunResult& r);

/// Built ledger certifies and its exact exponents match the closed forms.
Result ledger();

/// Error ratio of RK4 on the leader system over one period under step halving.
Result integrator_order();

/// Two simulate invocations with the same seed write identical CSV files.
Result determinism(double horizon);

}  // namespace criteria
