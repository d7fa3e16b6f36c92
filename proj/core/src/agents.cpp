#include "lagsync/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "lagsync/error.hpp"

namespace lagsync {

void LeaderExosystem::validate() const {
  if (S.rows() == 0 || S.rows() != S.cols()) throw DimensionMismatch("leader S must be square");
  if (E.cols() != S.rows()) throw DimensionMismatch("leader E must have as many columns as S");
  if (eta0.size() != S.rows()) throw DimensionMismatch("leader eta0 must match S");
}

Eigen::VectorXd leader_flow(const Eigen::VectorXd& eta, const Eigen::MatrixXd& S) {
  if (S.cols() != eta.size() || S.rows() != S.cols()) {
    throw DimensionMismatch("S is " + std::to_string(S.rows()) + "x" + std::to_string(S.cols()) +
                            ", eta has " + std::to_string(eta.size()) + " entries");
  }
  return S * eta;
}

namespace {

constexpr double kMaxCondition = 1e12;

// Eigenvalues (low, high) of a symmetric 2x2 matrix.
std::pair<double, double> sym2_eigs(const Eigen::Matrix2d& M) {
  const double mean = 0.5 * (M(0, 0) + M(1, 1));
  const double half_diff = 0.5 * (M(0, 0) - M(1, 1));
  const double r = std::hypot(half_diff, M(0, 1));
  return {mean - r, mean + r};
}

}  // namespace

Eigen::VectorXd manipulator_accel(const ElPlant& plant, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& qdot, const Eigen::VectorXd& tau) {
  const int m = plant.dof();
  if (q.size() != m || qdot.size() != m || tau.size() != m) {
    throw DimensionMismatch("plant has " + std::to_string(m) + " degrees of freedom");
  }
  const Eigen::MatrixXd M = plant.inertia(q);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(m - 1);
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw SingularInertia("inertia eigenvalues [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
  return M.llt().solve(tau - plant.coriolis(q, qdot) - plant.gravity(q));
}

Eigen::Matrix2d TwoLinkArm::inertia2(double q2) const {
  const auto& t = p_.theta;
  const double c2 = std::cos(q2);
  Eigen::Matrix2d M;
  M(0, 0) = t[0] + t[1] + 2.0 * t[2] * c2;
  M(0, 1) = t[1] + t[2] * c2;
  M(1, 0) = M(0, 1);
  M(1, 1) = t[3];
  return M;
}

Eigen::Vector2d TwoLinkArm::coriolis2(double q2, const Eigen::Vector2d& qd) const {
  const double h = p_.theta[2] * std::sin(q2);
  return {-h * qd[0] * qd[0] - 2.0 * h * qd[0] * qd[1], h * qd[1] * qd[1]};
}

Eigen::Vector2d TwoLinkArm::gravity2(const Eigen::Vector2d& q) const {
  const auto& t = p_.theta;
  const double c1 = std::cos(q[0]);
  const double c12 = std::cos(q[0] + q[1]);
  return {t[4] * p_.gravity * c1 + t[5] * p_.gravity * c12, t[5] * p_.gravity * c12};
}

Eigen::Vector2d TwoLinkArm::accel2(const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                                   const Eigen::Vector2d& tau) const {
  const Eigen::Matrix2d M = inertia2(q[1]);
  const auto [lo, hi] = sym2_eigs(M);
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    throw SingularInertia("inertia eigenvalues [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
  }
  return M.inverse() * (tau - coriolis2(q[1], qd) - gravity2(q));
}

Eigen::MatrixXd TwoLinkArm::inertia(const Eigen::VectorXd& q) const {
  if (q.size() != 2) throw DimensionMismatch("two-link arm expects q in R^2");
  return inertia2(q[1]);
}

Eigen::VectorXd TwoLinkArm::coriolis(const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) const {
  if (q.size() != 2 || qdot.size() != 2) throw DimensionMismatch("two-link arm expects R^2");
  return coriolis2(q[1], qdot);
}

Eigen::VectorXd TwoLinkArm::gravity(const Eigen::VectorXd& q) const {
  if (q.size() != 2) throw DimensionMismatch("two-link arm expects q in R^2");
  return gravity2(Eigen::Vector2d(q[0], q[1]));
}

ThetaRanges default_theta_ranges() {
  return {{{6.0, 8.0}, {0.8, 1.0}, {1.0, 1.4}, {5.5, 6.5}, {1.5, 2.0}, {1.0, 1.3}}};
}

namespace {

// 0, +d, -d, +2d, -2d, ... covering [-pi, pi]; the origin is visited first so
// ties resolve to the sample closest to it.
std::vector<double> outward_grid(int points) {
  const int half = std::max(points / 2, 1);
  const double delta = std::numbers::pi / half;
  std::vector<double> values{0.0};
  for (int k = 1; k <= half; ++k) {
    values.push_back(k * delta);
    values.push_back(-k * delta);
  }
  return values;
}

std::string describe(const std::array<double, 6>& theta, double q1, double q2) {
  std::ostringstream os;
  os << "theta=[";
  for (std::size_t k = 0; k < theta.size(); ++k) os << (k ? "," : "") << theta[k];
  os << "] q=(" << q1 << "," << q2 << ")";
  return os.str();
}

}  // namespace

BoundsCertificate evaluate_bounds(const ThetaRanges& ranges, const BoundsSpec& bounds,
                                  const CertificationGrid& grid) {
  BoundsCertificate cert;
  cert.km_inv = bounds.km_inv;
  cert.kM_inv = bounds.kM_inv;
  cert.kc = bounds.kc;
  cert.kg = bounds.kg;
  cert.v_max = grid.v_max;
  cert.min_eig_M = std::numeric_limits<double>::infinity();
  cert.max_eig_M = -std::numeric_limits<double>::infinity();
  cert.max_violation = -std::numeric_limits<double>::infinity();

  const double k_m = 1.0 / bounds.km_inv;
  const double k_M = 1.0 / bounds.kM_inv;
  const std::vector<double> qs = outward_grid(grid.q_points);
  std::vector<Eigen::Vector2d> directions;
  for (int k = 0; k < grid.direction_points; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / grid.direction_points;
    directions.emplace_back(std::cos(phi), std::sin(phi));
  }

  auto record = [&](double violation, auto&& describe_sample) {
    if (violation > cert.max_violation) {
      cert.max_violation = violation;
      cert.witness = describe_sample();
    }
  };

  for (int corner = 0; corner < 64; ++corner) {
    ManipulatorParams p;
    p.gravity = grid.gravity;
    for (int j = 0; j < 6; ++j) p.theta[j] = (corner >> j) & 1 ? ranges[j].second : ranges[j].first;
    const TwoLinkArm arm(p);
    for (double q2 : qs) {
      const auto [lo, hi] = sym2_eigs(arm.inertia2(q2));
      cert.min_eig_M = std::min(cert.min_eig_M, lo);
      cert.max_eig_M = std::max(cert.max_eig_M, hi);
      record(k_m - lo, [&] {
        return "lambda_min(M)=" + std::to_string(lo) + " < k_m at " + describe(p.theta, 0.0, q2);
      });
      record(hi - k_M, [&] {
        return "lambda_max(M)=" + std::to_string(hi) + " > k_M at " + describe(p.theta, 0.0, q2);
      });
      ++cert.samples_checked;
      for (const auto& dir : directions) {
        const double ratio = arm.coriolis2(q2, dir).norm();  // ||dir|| = 1
        cert.max_coriolis_ratio = std::max(cert.max_coriolis_ratio, ratio);
        record(ratio - bounds.kc, [&] {
          return "||C||/||q'||=" + std::to_string(ratio) + " > k_c at " + describe(p.theta, 0.0, q2);
        });
        ++cert.samples_checked;
      }
      for (double q1 : qs) {
        const double g = arm.gravity2({q1, q2}).norm();
        cert.max_gravity = std::max(cert.max_gravity, g);
        record(g - bounds.kg, [&] {
          return "||G||=" + std::to_string(g) + " > k_g at " + describe(p.theta, q1, q2);
        });
        ++cert.samples_checked;
      }
    }
  }
  cert.passed = cert.max_violation <= 0.0;
  if (cert.passed) cert.witness.clear();
  return cert;
}

BoundsCertificate certify_bounds(const ThetaRanges& ranges, const BoundsSpec& bounds,
                                 const CertificationGrid& grid) {
  BoundsCertificate cert = evaluate_bounds(ranges, bounds, grid);
  if (!cert.passed) {
    throw BoundViolated("worst violation " + std::to_string(cert.max_violation), cert.witness);
  }
  return cert;
}

BoundsSpec derive_bounds(const ThetaRanges& ranges, const CertificationGrid& grid, double margin) {
  // Any constants work here; only the recorded extremes are used.
  const BoundsCertificate c = evaluate_bounds(ranges, BoundsSpec{}, grid);
  BoundsSpec b;
  b.km_inv = (1.0 + margin) / c.min_eig_M;
  b.kM_inv = 1.0 / ((1.0 + margin) * c.max_eig_M);
  b.kc = (1.0 + margin) * c.max_coriolis_ratio;
  b.kg = (1.0 + margin) * c.max_gravity;
  return b;
}

}  // namespace lagsync
