#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include <Eigen/Dense>

namespace lagsync {

/**
 * @brief Exact rational number num/den, always stored reduced with den > 0.
 *
 * Used for every exponent in the observer and controller so that the
 * odd/odd structure of derived exponents (2a-1, 1/a, ...) can be checked
 * exactly before anything is evaluated in floating point.
 */
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

  /// True when numerator and denominator are both odd (zero is never odd-ratio).
  bool is_odd_ratio() const noexcept { return (num_ % 2 != 0) && (den_ % 2 != 0); }

  /// "7/9", "3" or "-5/3"; whitespace around '/' is allowed.
  static Rational parse(std::string_view text);
  std::string to_string() const;

  friend Rational operator+(Rational l, Rational r);
  friend Rational operator-(Rational l, Rational r);
  friend Rational operator*(Rational l, Rational r);
  friend Rational operator/(Rational l, Rational r);
  Rational operator-() const { return Rational(-num_, den_); }
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(Rational l, Rational r);
  friend bool operator>(Rational l, Rational r) { return r < l; }
  friend bool operator<=(Rational l, Rational r) { return !(r < l); }
  friend bool operator>=(Rational l, Rational r) { return !(l < r); }

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A rational whose numerator and denominator are both odd, so x^p is an
/// odd, sign-preserving map on the reals.
class OddRational {
 public:
  OddRational() : value_(1) {}
  /// Throws InvalidExponent unless num and den are odd and den > 0 after reduction.
  OddRational(std::int64_t num, std::int64_t den);
  explicit OddRational(Rational r);

  static OddRational parse(std::string_view text);

  const Rational& rational() const noexcept { return value_; }
  std::int64_t num() const noexcept { return value_.num(); }
  std::int64_t den() const noexcept { return value_.den(); }
  double value() const noexcept { return value_.value(); }
  std::string to_string() const { return value_.to_string(); }
  operator Rational() const { return value_; }  // NOLINT(google-explicit-constructor)

  friend bool operator==(const OddRational&, const OddRational&) = default;

 private:
  Rational value_;
};

/// sign(x)|x|^p for p > 0; sigpow(0, p) = 0. Throws NonPositiveExponent.
double sigpow(double x, double p);
inline double sigpow(double x, const Rational& p) { return sigpow(x, p.value()); }

/// Element-wise sigpow. For an odd-ratio p this is the element-wise power x^p.
Eigen::VectorXd sigpow(const Eigen::Ref<const Eigen::VectorXd>& x, double p);
inline Eigen::VectorXd sigpow(const Eigen::Ref<const Eigen::VectorXd>& x, const Rational& p) {
  return sigpow(x, p.value());
}

/// Element-wise |x|^p (the summands of ||x^p||_1).
Eigen::VectorXd abspow(const Eigen::Ref<const Eigen::VectorXd>& x, double p);

struct NormSet {
  double l1 = 0.0;
  double l2 = 0.0;
};

NormSet norms(const Eigen::Ref<const Eigen::VectorXd>& x);

// Inequality oracles. Each returns slack(s) that are nonnegative exactly when
// the corresponding power/Young inequality holds for the given inputs.

/// Power-sum sandwich. For p <= 1 returns
/// (sum|x|^p - (sum|x|)^p, n^{1-p}(sum|x|)^p - sum|x|^p); for p > 1 returns
/// ((sum|x|)^p - sum|x|^p, n^{p-1} sum|x|^p - (sum|x|)^p).
std::pair<double, double> oracle_power_sum(std::span<const double> xs, double p);

/// 2^{1-p}|xi - xj|^p - |xi^p - xj^p| for odd-ratio p in (0, 1].
double oracle_odd_power_difference(double xi, double xj, const OddRational& p);

/// Weighted Young inequality:
/// c/(c+d) r|xi|^{c+d} + d/(c+d) r^{-c/d}|xj|^{c+d} - |xi|^c |xj|^d.
double oracle_young(double xi, double xj, double c, double d, double r);

}  // namespace lagsync
