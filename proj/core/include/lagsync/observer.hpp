#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lagsync/network.hpp"
#include "lagsync/numerics.hpp"

namespace lagsync {

/// Gains of eta_i' = S eta_i - c1 y_i - c2 sig^a(y_i) - c3 sig^b(y_i).
/// c3 = 0 selects the finite-time observer (b is then unused).
struct ObserverGains {
  double c1 = 8.4;
  double c2 = 1.0;
  double c3 = 1.0;
  OddRational a{3, 5};
  OddRational b{3, 1};

  bool fixed_time() const noexcept { return c3 > 0.0; }
  friend bool operator==(const ObserverGains&, const ObserverGains&) = default;
};

/// ||D (x) S|| = max_i d_i * sigma_max(S) for diagonal D.
double kron_DS_norm(const Eigen::VectorXd& d, const Eigen::MatrixXd& S);

/// Throws GainConditionViolated naming the first failed condition:
/// c1 > ||D (x) S||, c2 > 0, c3 >= 0, 0 < a < 1 and, when c3 > 0, b > 1/a.
void validate_observer_gains(const ObserverGains& gains, const Eigen::VectorXd& d,
                             const Eigen::MatrixXd& S);

/// An in-neighbour's estimate as seen by follower i.
struct NeighborEstimate {
  double weight;
  Eigen::Ref<const Eigen::VectorXd> eta;
};

/// y_i = sum_j a_ij (eta_i - eta_j) over the supplied in-neighbours only.
/// Throws IsolatedAgent on an empty neighbour list.
Eigen::VectorXd innovation(const Eigen::VectorXd& eta_i, std::span<const NeighborEstimate> neighbors);

/// Convenience form: eta_all[0] is the leader, eta_all[i] follower i. Only the
/// in-neighbours of i in g are read.
Eigen::VectorXd innovation(int i, const std::vector<Eigen::VectorXd>& eta_all, const Digraph& g);

/// S eta_i - c1 y_i - c2 sig^a(y_i) - c3 sig^b(y_i).
Eigen::VectorXd observer_rhs(const Eigen::VectorXd& eta_i, const Eigen::VectorXd& y_i,
                             const ObserverGains& gains, const Eigen::MatrixXd& S);

/// Stacked innovation dynamics y' = (I (x) S) y - (H (x) I) Y with
/// Y_i = c1 y_i + c2 sig^a(y_i) + c3 sig^b(y_i).
Eigen::VectorXd innovation_dynamics(const Eigen::VectorXd& y, const Eigen::MatrixXd& H,
                                    const ObserverGains& gains, const Eigen::MatrixXd& S);

/**
 * @brief Constants of the observer's settling-time analysis.
 *
 * For the fixed-time observer T1_star bounds the settling time for every
 * initial condition. For the finite-time variant (c3 = 0) T1_star is
 * infinite and finite_time_bound() gives the state-dependent bound.
 */
struct ObserverConstants {
  double c_hat1 = 0.0;
  double c_hat2 = 0.0;
  double c_hat3 = 0.0;
  double T1_star = 0.0;
  double d_max = 0.0;
  double ds_norm = 0.0;  ///< ||D (x) S||
  bool fixed_time = true;
};

/// Throws GainConditionViolated if the gains do not satisfy the observer conditions.
ObserverConstants observer_constants(const ObserverGains& gains, const Eigen::VectorXd& d,
                                     const Eigen::MatrixXd& S, int n, int N);

/// 3 c_hat2 (a+1) V(y0)^{1 - 2a/(1+a)} / (c_hat1 (1-a)).
double finite_time_bound(const ObserverConstants& k, const ObserverGains& gains,
                         const Eigen::VectorXd& d, const Eigen::VectorXd& y0);

/// V(y) = sum_i d_i (c2 ||y_i^{1+a}||_1/(1+a) + c3 ||y_i^{1+b}||_1/(1+b))
///        + (c1/2) y^T (D (x) I) y, with y stacked agent by agent.
double lyapunov_V(const Eigen::VectorXd& y, const ObserverGains& gains, const Eigen::VectorXd& d);

}  // namespace lagsync
