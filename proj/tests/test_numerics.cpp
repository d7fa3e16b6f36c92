#include <doctest.h>

#include <cmath>
#include <vector>

#include "gen.hpp"
#include "lagsync/error.hpp"
#include "lagsync/numerics.hpp"

using namespace lagsync;

TEST_SUITE("numerics") {

TEST_CASE("sigpow fixed points and odd roots") {
  CHECK(sigpow(-8.0, 1.0 / 3.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(sigpow(32.0, Rational(3, 5)) == doctest::Approx(8.0).epsilon(1e-15));
  for (const Rational p : {Rational(1, 3), Rational(3, 5), Rational(9, 7), Rational(3)}) {
    Eigen::Vector3d x(0.0, 1.0, -1.0);
    CHECK(sigpow(x, p) == x);
  }
  CHECK_THROWS_AS(sigpow(1.0, 0.0), NonPositiveExponent);
  CHECK_THROWS_AS(sigpow(1.0, -0.5), NonPositiveExponent);
}

TEST_CASE("sigpow is odd, identity at p=1, increasing, and matches the scalar oracle") {
  gen::Gen g(11);
  for (int t = 0; t < 5000; ++t) {
    const double x = g.signed_magnitude();
    const double y = x + g.log_uniform(1e-6, 10.0);
    const double p = g.uniform(0.05, 4.0);
    CHECK(sigpow(-x, p) == -sigpow(x, p));
    CHECK(sigpow(x, 1.0) == x);
    CHECK(sigpow(y, p) > sigpow(x, p));
    CHECK(sigpow(x, p) == doctest::Approx(gen::sig(x, p)).epsilon(1e-14));
  }
}

TEST_CASE("sigpow round trip through the reciprocal odd exponent") {
  gen::Gen g(12);
  for (int t = 0; t < 5000; ++t) {
    const OddRational p = g.odd_ratio(0.05, 20.0);
    const OddRational inv(Rational(1) / p.rational());
    const double x = (g.coin() ? 1 : -1) * g.log_uniform(1e-3, 1e3);
    const double back = sigpow(sigpow(x, p.rational()), inv.rational());
    CHECK(std::abs(back - x) <= 1e-10 * std::abs(x));
  }
}

TEST_CASE("rational arithmetic is exact") {
  const Rational a(7, 9), b(9, 7);
  CHECK(b - a == Rational(32, 63));
  CHECK(b / a - Rational(1) == Rational(32, 49));
  CHECK(Rational(2, 6) == Rational(1, 3));
  CHECK(Rational(3, -5) == Rational(-3, 5));
  CHECK(Rational::parse(" 7 / 9 ") == a);
  CHECK(Rational::parse("-5/3").num() == -5);
  CHECK(a.to_string() == "7/9");
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK_THROWS_AS(Rational::parse("x/3"), InvalidExponent);
  CHECK_THROWS_AS(Rational(1, 0), InvalidExponent);
}

TEST_CASE("odd rationals reject even written forms") {
  CHECK(OddRational::parse("7/9").value() == doctest::Approx(7.0 / 9.0));
  CHECK(OddRational::parse("3").den() == 1);
  CHECK_THROWS_AS(OddRational::parse("2/4"), InvalidExponent);
  CHECK_THROWS_AS(OddRational::parse("2/6"), InvalidExponent);
  CHECK_THROWS_AS(OddRational(4, 3), InvalidExponent);
  CHECK_THROWS_AS(OddRational(3, 4), InvalidExponent);
  CHECK_THROWS_AS(OddRational(Rational(1, 2)), InvalidExponent);
}

TEST_CASE("norm set ordering") {
  gen::Gen g(13);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::VectorXd x = g.vector(g.integer(1, 8), g.log_uniform(1e-3, 1e3));
    const NormSet n = norms(x);
    CHECK(n.l1 >= n.l2);
    CHECK(n.l2 >= 0.0);
    CHECK(n.l1 == doctest::Approx(x.cwiseAbs().sum()));
  }
  const NormSet z = norms(Eigen::Vector2d::Zero());
  CHECK(z.l1 == 0.0);
  CHECK(z.l2 == 0.0);
}

TEST_CASE("power-sum sandwich oracle: hand values") {
  const std::vector<double> one{1.0};
  auto s = oracle_power_sum(one, 0.37);
  CHECK(s.first == 0.0);
  CHECK(s.second == 0.0);
  const std::vector<double> two{1.0, 1.0};
  s = oracle_power_sum(two, 0.5);
  CHECK(s.first == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(s.second) < 1e-14);
}

TEST_CASE("odd power difference oracle: hand values") {
  CHECK(oracle_odd_power_difference(1.0, 1.0, OddRational(3, 5)) == 0.0);
  CHECK(std::abs(oracle_odd_power_difference(1.0, -1.0, OddRational(1, 3))) < 1e-14);
}

TEST_CASE("Young oracle: hand values") {
  CHECK(oracle_young(0.0, 0.0, 1.0, 2.0, 3.0) == 0.0);
  CHECK(oracle_young(1.0, 1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.0));
}

}  // TEST_SUITE
