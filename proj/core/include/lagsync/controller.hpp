#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lagsync/agents.hpp"
#include "lagsync/numerics.hpp"

namespace lagsync {

enum class ControlMode { fixed, finite };

std::string to_string(ControlMode mode);
ControlMode parse_control_mode(std::string_view text);

/// User-facing controller gains. In finite mode gamma2 and k2 must be 0.
struct ControllerGains {
  OddRational alpha{7, 9};
  OddRational beta{9, 7};
  double gamma1 = 10.0;
  double gamma2 = 10.0;
  double k1 = 20.0;
  double k2 = 15.0;

  friend bool operator==(const ControllerGains&, const ControllerGains&) = default;
};

/// Exponents used by the control law, all checked to be odd ratios.
struct ControlExponents {
  OddRational alpha;
  OddRational beta;
  OddRational inv_alpha;         ///< 1/alpha
  OddRational two_alpha_minus1;  ///< 2 alpha - 1
  OddRational two_minus_alpha;   ///< 2 - alpha (zeta = eps^{2-alpha})
  OddRational high;              ///< beta/alpha + beta + alpha - 2

  /// Throws InvalidExponents unless 1/2 < alpha < 1, beta > 1 and every
  /// derived exponent is a ratio of odd integers.
  static ControlExponents from(const OddRational& alpha, const OddRational& beta);
};

/// One strict inequality of the gain selection: value > bound.
struct GainSlack {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double slack = 0.0;  ///< value - bound
};

struct SlackRecord {
  std::vector<GainSlack> entries;
  bool certified = false;  ///< every slack > 0
};

/**
 * @brief Every constant of the backstepping gain selection.
 *
 * p: the four exponent offsets. L1 and L2 are the domination levels that
 * the gamma and k lower bounds are built from; lambda are the coefficient
 * bounds of the derivative of the virtual control.
 */
struct GainLedger {
  ControlMode mode = ControlMode::fixed;
  OddRational alpha{7, 9};
  OddRational beta{9, 7};
  std::array<Rational, 4> p{};
  double L1 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  std::array<double, 4> lambda{};
  double L2 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
  double margin = 0.0;
  SlackRecord slack;
  bool certified = false;

  ControllerGains gains() const { return {alpha, beta, gamma1, gamma2, k1, k2}; }
};

/// p1 = 0, p2 = beta - alpha, p3 = beta/alpha - beta + alpha - 1, p4 = beta/alpha - 1.
std::array<Rational, 4> exponent_offsets(const Rational& alpha, const Rational& beta);

/// The l/ell auxiliary functions of the gain selection for fixed alpha, beta, gamma1, gamma2.
class LedgerFunctions {
 public:
  LedgerFunctions(double alpha, double beta, double gamma1, double gamma2);

  double l1(double p) const;
  double l2(double p) const;
  double l3(double p, double lambda) const;
  double l4(double p, double lambda) const;
  double ell1(double p) const { return factor_ * l1(p); }
  double ell2(double p) const { return factor_ * l2(p); }
  double ell3(double p, double lambda) const { return factor_ * l3(p, lambda); }
  double ell4(double p, double lambda) const { return factor_ * l4(p, lambda); }
  /// (2 - alpha) 2^{1-alpha}
  double factor() const { return factor_; }

 private:
  double alpha_, beta_, gamma1_, gamma2_, pow2_, factor_;
};

/// Slack of each strict inequality on gamma1, gamma2, k1, k2 for the given mode.
/// Finite mode uses the reduced conditions on gamma1 and k1 and requires gamma2 = k2 = 0.
SlackRecord check_gains(const ControllerGains& gains, ControlMode mode = ControlMode::fixed);

/// Ledger for user-supplied gains; certified reflects check_gains.
GainLedger make_ledger(const ControllerGains& gains, ControlMode mode = ControlMode::fixed);

/// Gains placed (1 + margin) above each lower bound. Throws InvalidExponents.
GainLedger build_ledger(const OddRational& alpha, const OddRational& beta, double margin = 0.05,
                        ControlMode mode = ControlMode::fixed);

/// eps = v^{1/alpha} + (gamma1 q^alpha + gamma2 q^beta)^{1/alpha}, element-wise odd powers.
Eigen::VectorXd epsilon_var(const Eigen::VectorXd& q_bar, const Eigen::VectorXd& v_bar, double gamma1,
                            double gamma2, const OddRational& alpha, const OddRational& beta);

/// -k1 eps^{2alpha-1} - k2 eps^{beta/alpha+beta+alpha-2} + E S S eta_i.
/// Throws UncertifiedGains when the ledger is not certified and no override is given.
Eigen::VectorXd u2(const Eigen::VectorXd& eps, const Eigen::VectorXd& eta_i, const GainLedger& ledger,
                   const Eigen::MatrixXd& E, const Eigen::MatrixXd& S, bool allow_uncertified = false);

/// Robust-term configuration derived from the envelope constants.
struct RobustConfig {
  double kappa = 3.0;
  double epsilon = 11.0 / 19.0;  ///< (km_inv - kM_inv) / (km_inv + kM_inv)
  double M_hat = 2.0 / 0.38;     ///< 2 / (km_inv + kM_inv)
  BoundsSpec bounds;

  /// Throws GainConditionViolated unless kappa >= 1 and km_inv > kM_inv > 0.
  static RobustConfig from_bounds(const BoundsSpec& bounds, double kappa);
  /// km_inv (kc ||v||^2 + kg)
  double f(const Eigen::VectorXd& v) const;
};

/**
 * Domination term. Zero when ||zeta|| = 0, otherwise
 * -kappa/(1-epsilon) * zeta/||zeta|| * (epsilon ||u2|| + f(v)).
 * With smooth_radius > 0, zeta/||zeta|| becomes zeta/max(||zeta||, radius)
 * (a boundary layer; outside the layer the law is unchanged).
 */
Eigen::VectorXd u1(const Eigen::VectorXd& zeta, const Eigen::VectorXd& u2, const Eigen::VectorXd& v,
                   const RobustConfig& rc, double smooth_radius = 0.0);

/// tau = M_hat (u1 + u2).
Eigen::VectorXd torque(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2, const RobustConfig& rc);

/// zeta^T Z with Z = u1 + (M^{-1} M_hat - I)(u1 + u2) + F, F = -M^{-1}(C v + G),
/// evaluated with the true plant. Non-positive whenever the envelope holds.
double domination_slack(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const Eigen::VectorXd& zeta,
                        const Eigen::VectorXd& u1, const Eigen::VectorXd& u2, const ElPlant& plant,
                        const RobustConfig& rc);

struct ControlOutput {
  Eigen::VectorXd tau;
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;
  Eigen::VectorXd eps;
  Eigen::VectorXd zeta;
};

/**
 * @brief Local control law of one follower.
 *
 * Reads only the follower's own position, velocity, observer state and
 * observer derivative.
 */
class ControlLaw {
 public:
  /// Throws UncertifiedGains when the gains fail check_gains and
  /// allow_uncertified is false.
  ControlLaw(const ControllerGains& gains, ControlMode mode, const RobustConfig& rc,
             const Eigen::MatrixXd& E, const Eigen::MatrixXd& S, bool allow_uncertified,
             double smooth_radius = 0.0);

  ControlOutput compute(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const Eigen::VectorXd& eta_i,
                        const Eigen::VectorXd& eta_dot_i) const;

  const GainLedger& ledger() const noexcept { return ledger_; }
  const RobustConfig& robust() const noexcept { return rc_; }

 private:
  GainLedger ledger_;
  ControlExponents exps_;
  RobustConfig rc_;
  Eigen::MatrixXd E_;
  Eigen::MatrixXd ESS_;
  double smooth_radius_;
};

}  // namespace lagsync
