#pragma once

#include <array>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace lagsync {

/// Leader exosystem eta0' = S eta0, q0 = E eta0.
struct LeaderExosystem {
  Eigen::MatrixXd S;
  Eigen::MatrixXd E;
  Eigen::VectorXd eta0;

  int n() const { return static_cast<int>(S.rows()); }
  int m() const { return static_cast<int>(E.rows()); }
  /// Throws DimensionMismatch unless S is n x n, E is m x n and eta0 has n entries.
  void validate() const;
};

/// Returns S eta. Throws DimensionMismatch.
Eigen::VectorXd leader_flow(const Eigen::VectorXd& eta, const Eigen::MatrixXd& S);

/**
 * @brief Euler-Lagrange plant M(q) q'' + C(q, q') q' + G(q) = tau.
 *
 * Only the product C(q, q') q' enters the dynamics, so implementations
 * provide that vector rather than a particular factorization of C.
 */
class ElPlant {
 public:
  virtual ~ElPlant() = default;
  virtual int dof() const = 0;
  virtual Eigen::MatrixXd inertia(const Eigen::VectorXd& q) const = 0;
  virtual Eigen::VectorXd coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) const = 0;
  virtual Eigen::VectorXd gravity(const Eigen::VectorXd& q) const = 0;
};

/// q'' = M^{-1}(tau - C q' - G). Throws SingularInertia when cond(M) > 1e12.
Eigen::VectorXd manipulator_accel(const ElPlant& plant, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qdot, const Eigen::VectorXd& tau);

/// theta_1..theta_6 of the planar two-link arm, plus gravitational acceleration.
struct ManipulatorParams {
  std::array<double, 6> theta{7.0, 0.96, 1.2, 5.96, 2.0, 1.2};
  double gravity = 9.8;

  friend bool operator==(const ManipulatorParams&, const ManipulatorParams&) = default;
};

/// Planar two-link manipulator with lumped parameters theta.
class TwoLinkArm final : public ElPlant {
 public:
  explicit TwoLinkArm(ManipulatorParams params) : p_(params) {}

  int dof() const override { return 2; }
  Eigen::MatrixXd inertia(const Eigen::VectorXd& q) const override;
  Eigen::VectorXd coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) const override;
  Eigen::VectorXd gravity(const Eigen::VectorXd& q) const override;

  // Allocation-free forms used by the simulator.
  Eigen::Matrix2d inertia2(double q2) const;
  Eigen::Vector2d coriolis2(double q2, const Eigen::Vector2d& qdot) const;
  Eigen::Vector2d gravity2(const Eigen::Vector2d& q) const;
  Eigen::Vector2d accel2(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                         const Eigen::Vector2d& tau) const;

  const ManipulatorParams& params() const noexcept { return p_; }

 private:
  ManipulatorParams p_;
};

inline Eigen::VectorXd manipulator_accel(const ManipulatorParams& p, const Eigen::VectorXd& q,
                                         const Eigen::VectorXd& qdot, const Eigen::VectorXd& tau) {
  return manipulator_accel(TwoLinkArm(p), q, qdot, tau);
}

/// Envelope constants k_m^{-1}, k_M^{-1}, k_c, k_g of
/// k_m I <= M <= k_M I, ||C|| <= k_c ||q'||, ||G|| <= k_g.
struct BoundsSpec {
  double km_inv = 0.3;
  double kM_inv = 0.08;
  double kc = 3.0;
  double kg = 50.0;

  friend bool operator==(const BoundsSpec&, const BoundsSpec&) = default;
};

using ThetaRanges = std::array<std::pair<double, double>, 6>;

/// Ranges for the two-link example; theta_4 has no stated range and
/// defaults to [5.5, 6.5].
ThetaRanges default_theta_ranges();

struct CertificationGrid {
  int q_points = 73;          ///< per joint, over [-pi, pi]
  int direction_points = 72;  ///< unit velocity directions
  double v_max = 5.0;         ///< velocity ball radius reported with k_c
  double gravity = 9.8;
};

struct BoundsCertificate {
  double km_inv = 0.0;
  double kM_inv = 0.0;
  double kc = 0.0;
  double kg = 0.0;
  long samples_checked = 0;
  double max_violation = 0.0;  ///< <= 0 on pass
  bool passed = false;
  std::string witness;         ///< worst sample, empty on pass
  // Extremes seen on the grid.
  double min_eig_M = 0.0;
  double max_eig_M = 0.0;
  double max_coriolis_ratio = 0.0;  ///< max ||C q'|| / ||q'||^2
  double max_gravity = 0.0;
  double v_max = 0.0;
};

/**
 * Grid check of the envelope: theta at all 64 interval corners, q on a
 * q_points x q_points grid over [-pi, pi]^2 ordered outward from 0, and
 * velocity directions on the unit circle. ||C|| is the induced 2-norm of
 * the minimum-norm factorization C = (C q') q'^T / ||q'||^2, which equals
 * ||C q'|| / ||q'|| and scales homogeneously with ||q'||.
 *
 * Never throws on violation; see certify_bounds for the throwing form.
 */
BoundsCertificate evaluate_bounds(const ThetaRanges& ranges, const BoundsSpec& bounds,
                                  const CertificationGrid& grid = {});

/// evaluate_bounds, throwing BoundViolated (with witness) when any bound fails.
BoundsCertificate certify_bounds(const ThetaRanges& ranges, const BoundsSpec& bounds,
                                 const CertificationGrid& grid = {});

/// Tightest constants the grid supports, inflated by (1 + margin).
BoundsSpec derive_bounds(const ThetaRanges& ranges, const CertificationGrid& grid = {},
                         double margin = 0.01);

}  // namespace lagsync
