#include "lagsync/numerics.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "lagsync/error.hpp"

namespace lagsync {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw InvalidExponent("'" + std::string(whole) + "' is not an integer ratio");
  }
  return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InvalidExponent("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g == 0 ? 0 : num / g;
  den_ = g == 0 ? 1 : den / g;
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text), 1);
  return Rational(parse_int(text.substr(0, slash), text), parse_int(text.substr(slash + 1), text));
}

std::string Rational::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(Rational l, Rational r) {
  return Rational(l.num_ * r.den_ + r.num_ * l.den_, l.den_ * r.den_);
}
Rational operator-(Rational l, Rational r) { return l + (-r); }
Rational operator*(Rational l, Rational r) { return Rational(l.num_ * r.num_, l.den_ * r.den_); }
Rational operator/(Rational l, Rational r) {
  if (r.num_ == 0) throw InvalidExponent("division by zero rational");
  return Rational(l.num_ * r.den_, l.den_ * r.num_);
}
bool operator<(Rational l, Rational r) { return l.num_ * r.den_ < r.num_ * l.den_; }

OddRational::OddRational(Rational r) : value_(r) {
  if (!value_.is_odd_ratio()) {
    throw InvalidExponent(value_.to_string() + " is not a ratio of two odd integers");
  }
}

OddRational::OddRational(std::int64_t num, std::int64_t den) : OddRational(Rational(num, den)) {
  // Reduction can never turn odd/odd into something else, but "2/6" -> "1/3"
  // must still be rejected: the written form has to be odd/odd.
  if (num % 2 == 0 || den % 2 == 0) {
    throw InvalidExponent(std::to_string(num) + "/" + std::to_string(den) +
                          " is not a ratio of two odd integers");
  }
}

OddRational OddRational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return OddRational(parse_int(text, text), 1);
  return OddRational(parse_int(text.substr(0, slash), text),
                     parse_int(text.substr(slash + 1), text));
}

double sigpow(double x, double p) {
  if (!(p > 0.0)) throw NonPositiveExponent("exponent " + std::to_string(p) + " must be > 0");
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), p), x);
}

Eigen::VectorXd sigpow(const Eigen::Ref<const Eigen::VectorXd>& x, double p) {
  if (!(p > 0.0)) throw NonPositiveExponent("exponent " + std::to_string(p) + " must be > 0");
  Eigen::VectorXd out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = sigpow(x[k], p);
  return out;
}

Eigen::VectorXd abspow(const Eigen::Ref<const Eigen::VectorXd>& x, double p) {
  Eigen::VectorXd out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) out[k] = std::pow(std::abs(x[k]), p);
  return out;
}

NormSet norms(const Eigen::Ref<const Eigen::VectorXd>& x) {
  return {x.lpNorm<1>(), x.norm()};
}

std::pair<double, double> oracle_power_sum(std::span<const double> xs, double p) {
  double sum_abs = 0.0;
  double sum_pow = 0.0;
  for (double x : xs) {
    sum_abs += std::abs(x);
    sum_pow += std::pow(std::abs(x), p);
  }
  const double n = static_cast<double>(xs.size());
  const double pow_sum = std::pow(sum_abs, p);
  if (p <= 1.0) {
    return {sum_pow - pow_sum, std::pow(n, 1.0 - p) * pow_sum - sum_pow};
  }
  return {pow_sum - sum_pow, std::pow(n, p - 1.0) * sum_pow - pow_sum};
}

double oracle_odd_power_difference(double xi, double xj, const OddRational& p) {
  const double e = p.value();
  return std::pow(2.0, 1.0 - e) * std::pow(std::abs(xi - xj), e) -
         std::abs(sigpow(xi, e) - sigpow(xj, e));
}

double oracle_young(double xi, double xj, double c, double d, double r) {
  const double s = c + d;
  return c / s * r * std::pow(std::abs(xi), s) +
         d / s * std::pow(r, -c / d) * std::pow(std::abs(xj), s) -
         std::pow(std::abs(xi), c) * std::pow(std::abs(xj), d);
}

}  // namespace lagsync
