#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "lagsync/controller.hpp"
#include "lagsync/error.hpp"

using namespace lagsync;

namespace {

Eigen::MatrixXd rot() {
  Eigen::Matrix2d S;
  S << 0, 1, -1, 0;
  return S;
}

const OddRational kAlpha(7, 9), kBeta(9, 7);

}  // namespace

TEST_SUITE("controller") {

TEST_CASE("exponent offsets are exact") {
  const auto p = exponent_offsets(kAlpha, kBeta);
  CHECK(p[0] == Rational(0));
  CHECK(p[1] == Rational(32, 63));
  CHECK(p[2] == Rational(64, 441));
  CHECK(p[3] == Rational(32, 49));
}

TEST_CASE("derived exponents must be odd ratios") {
  const ControlExponents e = ControlExponents::from(kAlpha, kBeta);
  CHECK(e.inv_alpha.rational() == Rational(9, 7));
  CHECK(e.two_alpha_minus1.rational() == Rational(5, 9));
  CHECK(e.two_minus_alpha.rational() == Rational(11, 9));
  CHECK(e.high.rational() == Rational(81, 49) + Rational(9, 7) + Rational(7, 9) - Rational(2));
  CHECK_THROWS_AS(ControlExponents::from(OddRational(1, 3), kBeta), InvalidExponents);   // alpha <= 1/2
  CHECK_THROWS_AS(ControlExponents::from(OddRational(1, 1), kBeta), InvalidExponents);   // alpha = 1
  CHECK_THROWS_AS(ControlExponents::from(kAlpha, OddRational(1, 1)), InvalidExponents);  // beta = 1
}

TEST_CASE("ledger built with a margin passes its own check") {
  const GainLedger l = build_ledger(kAlpha, kBeta, 0.05);
  CHECK(l.certified);
  REQUIRE(l.slack.entries.size() == 4);
  for (const auto& s : l.slack.entries) {
    CHECK(s.slack > 0.0);
    CHECK(s.value == doctest::Approx(1.05 * s.bound).epsilon(1e-12));
  }
  const SlackRecord again = check_gains(l.gains());
  CHECK(again.certified);
  const double ia = 9.0 / 7.0, ba = (9.0 / 7.0) / (7.0 / 9.0);
  CHECK(l.lambda[0] == doctest::Approx(std::pow(l.gamma1, ia)).epsilon(1e-14));
  CHECK(l.lambda[1] == doctest::Approx(std::pow(l.gamma1, ia - 1) * l.gamma2 * ba).epsilon(1e-14));
  CHECK(l.lambda[2] == doctest::Approx(l.gamma1 * std::pow(l.gamma2, ia - 1)).epsilon(1e-14));
  CHECK(l.lambda[3] == doctest::Approx(std::pow(l.gamma2, ia) * ba).epsilon(1e-14));
  CHECK(l.p[0] == Rational(0));
}

TEST_CASE("ledger is consistent for random valid exponents") {
  gen::Gen g(51);
  int built = 0;
  for (int t = 0; t < 400 && built < 60; ++t) {
    const OddRational a = g.odd_ratio(0.5, 1.0), b = g.odd_ratio(1.0, 3.0);
    GainLedger l;
    try {
      l = build_ledger(a, b, g.uniform(0.01, 0.5));
    } catch (const InvalidExponents&) {
      continue;
    }
    ++built;
    CHECK(l.certified);
    CHECK(check_gains(l.gains()).certified);
    CHECK(l.p[0] == Rational(0));
    CHECK(l.lambda[0] == doctest::Approx(std::pow(l.gamma1, 1.0 / a.value())));
  }
  CHECK(built > 10);
}

TEST_CASE("check_gains flags violations") {
  ControllerGains g = build_ledger(kAlpha, kBeta, 0.05).gains();
  g.gamma1 = 0.0;
  const SlackRecord r = check_gains(g);
  CHECK_FALSE(r.certified);
  CHECK(r.entries[0].name == "gamma1");
  CHECK(r.entries[0].slack < 0.0);
  // The example gains are recorded, not asserted certified.
  const SlackRecord example = check_gains(ControllerGains{});
  CHECK(example.entries.size() == 4);
  CHECK_FALSE(example.certified);
}

TEST_CASE("finite-mode ledger") {
  const GainLedger l = build_ledger(kAlpha, kBeta, 0.05, ControlMode::finite);
  CHECK(l.certified);
  CHECK(l.gamma2 == 0.0);
  CHECK(l.k2 == 0.0);
  ControllerGains g = l.gains();
  g.k2 = 1.0;
  CHECK_FALSE(check_gains(g, ControlMode::finite).certified);
}

TEST_CASE("epsilon variable") {
  const Eigen::Vector2d z = Eigen::Vector2d::Zero();
  CHECK(epsilon_var(z, z, 10, 10, kAlpha, kBeta).norm() == 0.0);
  CHECK(epsilon_var(z, Eigen::Vector2d(1, 0), 10, 10, kAlpha, kBeta)[0] == 1.0);
  const double e = epsilon_var(Eigen::Vector2d(1, 0), z, 10, 10, kAlpha, kBeta)[0];
  CHECK(e == doctest::Approx(std::pow(20.0, 9.0 / 7.0)).epsilon(1e-14));
  CHECK(e == doctest::Approx(47.06).epsilon(1e-3));
  gen::Gen g(52);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd q = g.vector(2, 3), v = g.vector(2, 3);
    const double g1 = g.uniform(0.1, 20), g2 = g.uniform(0.1, 20);
    const Eigen::VectorXd eps = epsilon_var(q, v, g1, g2, kAlpha, kBeta);
    for (int k = 0; k < 2; ++k) {
      const double expect =
          gen::sig(v[k], 9.0 / 7.0) + gen::sig(g1 * gen::sig(q[k], 7.0 / 9.0) + g2 * gen::sig(q[k], 9.0 / 7.0), 9.0 / 7.0);
      CHECK(eps[k] == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("u2") {
  const GainLedger example = make_ledger(ControllerGains{});
  const Eigen::MatrixXd E = Eigen::Matrix2d::Identity();
  const Eigen::Vector2d eta(0.7, -0.2);
  CHECK_THROWS_AS(u2(Eigen::Vector2d::Zero(), eta, example, E, rot()), UncertifiedGains);
  CHECK((u2(Eigen::Vector2d::Zero(), eta, example, E, rot(), true) + eta).norm() < 1e-15);
  const Eigen::VectorXd one = u2(Eigen::Vector2d(1, 0), Eigen::Vector2d::Zero(), example, E, rot(), true);
  CHECK(one[0] == doctest::Approx(-(20.0 + 15.0)));
  CHECK(one[1] == 0.0);
  gen::Gen g(53);
  for (int t = 0; t < 500; ++t) {
    const Eigen::VectorXd eps = g.vector(2, g.log_uniform(1e-3, 1e2));
    const Eigen::VectorXd a = u2(eps, Eigen::Vector2d::Zero(), example, E, rot(), true);
    const Eigen::VectorXd b = u2(-eps, Eigen::Vector2d::Zero(), example, E, rot(), true);
    CHECK((a + b).norm() == 0.0);
  }
}

TEST_CASE("u1 and torque") {
  RobustConfig rc;
  rc.kappa = 2.0;
  rc.epsilon = 0.5;
  rc.bounds = {1.0, 0.5, 0.0, 1.0};  // f(v) = 1
  const Eigen::Vector2d zeta(0.6, 0.8);
  const Eigen::Vector2d u2v(2.0, 0.0);
  const Eigen::VectorXd out = u1(zeta, u2v, Eigen::Vector2d(3, 4), rc);
  CHECK(out.norm() == doctest::Approx(8.0));
  CHECK((out + 8.0 * zeta).norm() < 1e-14);
  CHECK(u1(Eigen::Vector2d::Zero(), u2v, Eigen::Vector2d::Zero(), rc).norm() == 0.0);
  CHECK(u1(1e-6 * zeta, u2v, Eigen::Vector2d::Zero(), rc).norm() == doctest::Approx(8.0));
  CHECK(u1(1e3 * zeta, u2v, Eigen::Vector2d::Zero(), rc).norm() == doctest::Approx(8.0));
  // Boundary layer: linear inside the radius, unchanged outside.
  CHECK(u1(0.1 * zeta, u2v, Eigen::Vector2d::Zero(), rc, 0.2).norm() == doctest::Approx(4.0));
  CHECK(u1(zeta, u2v, Eigen::Vector2d::Zero(), rc, 0.2).norm() == doctest::Approx(8.0));

  const RobustConfig example = RobustConfig::from_bounds(BoundsSpec{}, 3.0);
  CHECK(example.M_hat == doctest::Approx(2.0 / 0.38));
  CHECK(example.M_hat == doctest::Approx(5.263).epsilon(1e-4));
  CHECK(example.epsilon == doctest::Approx(11.0 / 19.0));
  CHECK(torque(Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), example).norm() == 0.0);
  const Eigen::Vector2d a(1, -2), b(0.5, 3);
  CHECK((torque(a, b, example) - example.M_hat * (a + b)).norm() < 1e-13);
  CHECK((torque(2 * a, 2 * b, example) - 2 * torque(a, b, example)).norm() < 1e-12);
  CHECK_THROWS_AS(RobustConfig::from_bounds(BoundsSpec{}, 0.5), GainConditionViolated);
  CHECK_THROWS_AS(RobustConfig::from_bounds(BoundsSpec{0.08, 0.3, 3, 50}, 3.0), GainConditionViolated);
}

TEST_CASE("domination slack is zero at zeta = 0") {
  const RobustConfig rc = RobustConfig::from_bounds(BoundsSpec{}, 3.0);
  const TwoLinkArm arm(ManipulatorParams{});
  const Eigen::Vector2d z = Eigen::Vector2d::Zero();
  CHECK(domination_slack(Eigen::Vector2d(0.3, 1), Eigen::Vector2d(1, 2), z, z, Eigen::Vector2d(4, 5), arm, rc) == 0.0);
}

TEST_CASE("finite-time reduction is bit-identical to the reduced law") {
  const GainLedger l = build_ledger(kAlpha, kBeta, 0.05, ControlMode::finite);
  const RobustConfig rc = RobustConfig::from_bounds(BoundsSpec{}, 2.0);
  const Eigen::MatrixXd E = Eigen::Matrix2d::Identity();
  const ControlLaw law(l.gains(), ControlMode::finite, rc, E, rot(), false);
  gen::Gen g(54);
  for (int t = 0; t < 500; ++t) {
    const Eigen::VectorXd q = g.vector(2, 2), v = g.vector(2, 2), eta = g.vector(2, 2), eta_dot = g.vector(2, 2);
    const ControlOutput out = law.compute(q, v, eta, eta_dot);
    const Eigen::VectorXd qb = q - E * eta, vb = v - E * eta_dot;
    const Eigen::VectorXd eps = sigpow(vb, 1.0 / kAlpha.value()) + std::pow(l.gamma1, 1.0 / kAlpha.value()) * qb;
    const Eigen::VectorXd u2v = -l.k1 * sigpow(eps, (Rational(2) * kAlpha.rational() - Rational(1)).value()) + (E * rot() * rot()) * eta;
    const Eigen::VectorXd zeta = sigpow(eps, (Rational(2) - kAlpha.rational()).value());
    const Eigen::VectorXd u1v = u1(zeta, u2v, v, rc);
    CHECK(out.eps == eps);
    CHECK(out.u2 == u2v);
    CHECK(out.zeta == zeta);
    CHECK(out.tau == rc.M_hat * (u1v + u2v));
  }
}

TEST_CASE("torque is odd in the tracking errors when eta = 0") {
  const RobustConfig rc = RobustConfig::from_bounds(BoundsSpec{}, 3.0);
  const ControlLaw law(ControllerGains{}, ControlMode::fixed, rc, Eigen::Matrix2d::Identity(), rot(), true);
  gen::Gen g(55);
  const Eigen::Vector2d z = Eigen::Vector2d::Zero();
  for (int t = 0; t < 500; ++t) {
    const Eigen::VectorXd q = g.vector(2, 3), v = g.vector(2, 3);
    CHECK((law.compute(q, v, z, z).tau + law.compute(-q, -v, z, z).tau).norm() == 0.0);
  }
}

TEST_CASE("control law refuses uncertified gains without the override") {
  const RobustConfig rc = RobustConfig::from_bounds(BoundsSpec{}, 3.0);
  CHECK_THROWS_AS(ControlLaw(ControllerGains{}, ControlMode::fixed, rc, Eigen::Matrix2d::Identity(), rot(), false),
                  UncertifiedGains);
}

}  // TEST_SUITE
