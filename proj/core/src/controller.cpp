#include "lagsync/controller.hpp"

#include <algorithm>
#include <cmath>

#include "lagsync/error.hpp"

namespace lagsync {

std::string to_string(ControlMode mode) { return mode == ControlMode::fixed ? "fixed" : "finite"; }

ControlMode parse_control_mode(std::string_view text) {
  if (text == "fixed") return ControlMode::fixed;
  if (text == "finite") return ControlMode::finite;
  throw InvalidExponents("unknown mode '" + std::string(text) + "' (expected fixed|finite)");
}

ControlExponents ControlExponents::from(const OddRational& alpha, const OddRational& beta) {
  const Rational a = alpha;
  const Rational b = beta;
  if (!(a > Rational(1, 2) && a < Rational(1))) {
    throw InvalidExponents("alpha = " + a.to_string() + " must lie in (1/2, 1)");
  }
  if (!(b > Rational(1))) throw InvalidExponents("beta = " + b.to_string() + " must exceed 1");
  auto odd = [](const Rational& r, const char* what) {
    if (!r.is_odd_ratio()) {
      throw InvalidExponents(std::string(what) + " = " + r.to_string() + " is not an odd ratio");
    }
    return OddRational(r);
  };
  ControlExponents e;
  e.alpha = alpha;
  e.beta = beta;
  e.inv_alpha = odd(Rational(1) / a, "1/alpha");
  e.two_alpha_minus1 = odd(Rational(2) * a - Rational(1), "2alpha-1");
  e.two_minus_alpha = odd(Rational(2) - a, "2-alpha");
  e.high = odd(b / a + b + a - Rational(2), "beta/alpha+beta+alpha-2");
  return e;
}

std::array<Rational, 4> exponent_offsets(const Rational& alpha, const Rational& beta) {
  const Rational one(1);
  return {Rational(0), beta - alpha, beta / alpha - beta + alpha - one, beta / alpha - one};
}

LedgerFunctions::LedgerFunctions(double alpha, double beta, double gamma1, double gamma2)
    : alpha_(alpha),
      beta_(beta),
      gamma1_(gamma1),
      gamma2_(gamma2),
      pow2_(std::pow(2.0, 1.0 - alpha)),
      factor_((2.0 - alpha) * std::pow(2.0, 1.0 - alpha)) {}

double LedgerFunctions::l1(double p) const {
  return pow2_ * p / (p + 1.0 + alpha_) + (p + alpha_) / (p + alpha_ + 1.0);
}

double LedgerFunctions::l2(double p) const { return (p + beta_) / (p + beta_ + 1.0); }

double LedgerFunctions::l3(double p, double lambda) const {
  const double s = p + alpha_ + 1.0;
  return pow2_ * (1.0 + alpha_) / s * std::pow(lambda, s / (1.0 + alpha_)) +
         std::pow(lambda * gamma1_, s) / s;
}

double LedgerFunctions::l4(double p, double lambda) const {
  const double s = p + beta_ + 1.0;
  return std::pow(lambda * gamma2_, s) / s;
}

namespace {

struct FixedBounds {
  std::array<double, 4> p{};
  double L1 = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

FixedBounds gamma_bounds(const ControlExponents& e) {
  const double a = e.alpha.value();
  const double b = e.beta.value();
  const auto pr = exponent_offsets(e.alpha, e.beta);
  FixedBounds fb;
  for (int j = 0; j < 4; ++j) fb.p[j] = pr[j].value();
  const LedgerFunctions f(a, b, 0.0, 0.0);  // ell1/ell2 do not involve gamma
  const double pow2 = std::pow(2.0, 1.0 - a);
  const double ba = b / a;
  fb.L1 = std::max(f.ell2(fb.p[1]), f.ell1(fb.p[2]));
  fb.gamma1 = std::max(pow2 / (1.0 + a) + f.ell1(fb.p[0]) + 2.0 * fb.L1,
                       pow2 * ba / (ba + a) + f.ell2(fb.p[2]) + f.ell1(fb.p[3]));
  fb.gamma2 = std::max(f.ell2(fb.p[3]) + 2.0 * fb.L1, f.ell2(fb.p[0]) + f.ell1(fb.p[1]));
  return fb;
}

std::array<double, 4> lambdas(double alpha, double beta, double gamma1, double gamma2) {
  const double ia = 1.0 / alpha;
  return {std::pow(gamma1, ia), std::pow(gamma1, ia - 1.0) * gamma2 * beta / alpha,
          gamma1 * std::pow(gamma2, ia - 1.0), std::pow(gamma2, ia) * beta / alpha};
}

struct KBounds {
  double L2 = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;
};

KBounds k_bounds(const ControlExponents& e, const std::array<double, 4>& p,
                 const std::array<double, 4>& lam, double gamma1, double gamma2) {
  const double a = e.alpha.value();
  const double b = e.beta.value();
  const LedgerFunctions f(a, b, gamma1, gamma2);
  const double pow2 = std::pow(2.0, 1.0 - a);
  const double ba = b / a;
  KBounds kb;
  kb.L2 = std::max({pow2 * a / (ba + a) + f.ell4(p[2], lam[2]) + f.ell3(p[3], lam[3]),
                    f.ell4(p[0], lam[0]) + f.ell3(p[1], lam[1]), f.ell4(p[1], lam[1]),
                    f.ell3(p[2], lam[2])});
  kb.k1 = pow2 * a / (a + 1.0) + f.ell3(p[0], lam[0]) + 4.0 * kb.L2;
  kb.k2 = f.ell4(p[3], lam[3]) + 4.0 * kb.L2;
  return kb;
}

double finite_gamma1_bound(double a) {
  const double pow2 = std::pow(2.0, 1.0 - a);
  return pow2 / (1.0 + a) + a * (2.0 - a) * pow2 / (1.0 + a);
}

double finite_k1_bound(double a, double gamma1) {
  const double pow2 = std::pow(2.0, 1.0 - a);
  return std::pow(gamma1, 1.0 + 1.0 / a) *
         (pow2 * a / (1.0 + a) + (2.0 - a) * pow2 / gamma1 * (pow2 + gamma1 / (1.0 + a)));
}

GainSlack entry(std::string name, double value, double bound) {
  return {std::move(name), value, bound, value - bound};
}

void finish(SlackRecord& r) {
  r.certified = std::all_of(r.entries.begin(), r.entries.end(),
                            [](const GainSlack& s) { return s.slack > 0.0; });
}

}  // namespace

SlackRecord check_gains(const ControllerGains& g, ControlMode mode) {
  const ControlExponents e = ControlExponents::from(g.alpha, g.beta);
  SlackRecord r;
  if (mode == ControlMode::finite) {
    const double a = e.alpha.value();
    r.entries.push_back(entry("gamma1", g.gamma1, finite_gamma1_bound(a)));
    r.entries.push_back(entry("k1", g.k1, finite_k1_bound(a, g.gamma1)));
    // Reduced design: gamma2 = k2 = 0 exactly; recorded as equalities.
    r.entries.push_back({"gamma2 == 0", g.gamma2, 0.0, g.gamma2 == 0.0 ? 1.0 : -std::abs(g.gamma2)});
    r.entries.push_back({"k2 == 0", g.k2, 0.0, g.k2 == 0.0 ? 1.0 : -std::abs(g.k2)});
    finish(r);
    return r;
  }
  const FixedBounds fb = gamma_bounds(e);
  const auto lam = lambdas(e.alpha.value(), e.beta.value(), g.gamma1, g.gamma2);
  const KBounds kb = k_bounds(e, fb.p, lam, g.gamma1, g.gamma2);
  r.entries.push_back(entry("gamma1", g.gamma1, fb.gamma1));
  r.entries.push_back(entry("gamma2", g.gamma2, fb.gamma2));
  r.entries.push_back(entry("k1", g.k1, kb.k1));
  r.entries.push_back(entry("k2", g.k2, kb.k2));
  finish(r);
  return r;
}

namespace {

GainLedger fill_ledger(const ControllerGains& g, ControlMode mode, double margin) {
  const ControlExponents e = ControlExponents::from(g.alpha, g.beta);
  GainLedger led;
  led.mode = mode;
  led.alpha = g.alpha;
  led.beta = g.beta;
  led.p = exponent_offsets(g.alpha, g.beta);
  led.gamma1 = g.gamma1;
  led.gamma2 = g.gamma2;
  led.k1 = g.k1;
  led.k2 = g.k2;
  led.margin = margin;
  const FixedBounds fb = gamma_bounds(e);
  led.L1 = fb.L1;
  led.lambda = lambdas(e.alpha.value(), e.beta.value(), g.gamma1, g.gamma2);
  led.L2 = k_bounds(e, fb.p, led.lambda, g.gamma1, g.gamma2).L2;
  led.slack = check_gains(g, mode);
  led.certified = led.slack.certified;
  return led;
}

}  // namespace

GainLedger make_ledger(const ControllerGains& gains, ControlMode mode) {
  return fill_ledger(gains, mode, 0.0);
}

GainLedger build_ledger(const OddRational& alpha, const OddRational& beta, double margin,
                        ControlMode mode) {
  if (!(margin > 0.0)) throw GainConditionViolated("ledger margin must be > 0");
  const ControlExponents e = ControlExponents::from(alpha, beta);
  const double scale = 1.0 + margin;
  ControllerGains g{alpha, beta, 0.0, 0.0, 0.0, 0.0};
  if (mode == ControlMode::finite) {
    g.gamma1 = scale * finite_gamma1_bound(e.alpha.value());
    g.k1 = scale * finite_k1_bound(e.alpha.value(), g.gamma1);
  } else {
    const FixedBounds fb = gamma_bounds(e);
    g.gamma1 = scale * fb.gamma1;
    g.gamma2 = scale * fb.gamma2;
    const auto lam = lambdas(e.alpha.value(), e.beta.value(), g.gamma1, g.gamma2);
    const KBounds kb = k_bounds(e, fb.p, lam, g.gamma1, g.gamma2);
    g.k1 = scale * kb.k1;
    g.k2 = scale * kb.k2;
  }
  return fill_ledger(g, mode, margin);
}

Eigen::VectorXd epsilon_var(const Eigen::VectorXd& q_bar, const Eigen::VectorXd& v_bar, double gamma1,
                            double gamma2, const OddRational& alpha, const OddRational& beta) {
  if (q_bar.size() != v_bar.size()) throw DimensionMismatch("q_bar and v_bar differ in size");
  const double ia = 1.0 / alpha.value();
  Eigen::VectorXd eps = sigpow(v_bar, ia);
  if (gamma2 == 0.0) {
    // (gamma1 q^alpha)^{1/alpha} = gamma1^{1/alpha} q for odd-ratio alpha.
    eps += std::pow(gamma1, ia) * q_bar;
  } else {
    const Eigen::VectorXd inner = gamma1 * sigpow(q_bar, alpha.value()) + gamma2 * sigpow(q_bar, beta.value());
    eps += sigpow(inner, ia);
  }
  return eps;
}

namespace {

Eigen::VectorXd u2_terms(const Eigen::VectorXd& eps, double k1, double k2, const ControlExponents& e) {
  Eigen::VectorXd out = -k1 * sigpow(eps, e.two_alpha_minus1.value());
  if (k2 != 0.0) out -= k2 * sigpow(eps, e.high.value());
  return out;
}

}  // namespace

Eigen::VectorXd u2(const Eigen::VectorXd& eps, const Eigen::VectorXd& eta_i, const GainLedger& ledger,
                   const Eigen::MatrixXd& E, const Eigen::MatrixXd& S, bool allow_uncertified) {
  if (!ledger.certified && !allow_uncertified) {
    throw UncertifiedGains("controller gains fail the selection inequalities");
  }
  const ControlExponents e = ControlExponents::from(ledger.alpha, ledger.beta);
  return u2_terms(eps, ledger.k1, ledger.k2, e) + E * (S * (S * eta_i));
}

RobustConfig RobustConfig::from_bounds(const BoundsSpec& bounds, double kappa) {
  if (!(kappa >= 1.0)) throw GainConditionViolated("kappa >= 1 fails");
  if (!(bounds.kM_inv > 0.0 && bounds.km_inv > bounds.kM_inv)) {
    throw GainConditionViolated("km_inv > kM_inv > 0 fails");
  }
  if (!(bounds.kc >= 0.0 && bounds.kg >= 0.0)) throw GainConditionViolated("kc, kg must be >= 0");
  RobustConfig rc;
  rc.kappa = kappa;
  rc.bounds = bounds;
  rc.epsilon = (bounds.km_inv - bounds.kM_inv) / (bounds.km_inv + bounds.kM_inv);
  rc.M_hat = 2.0 / (bounds.km_inv + bounds.kM_inv);
  return rc;
}

double RobustConfig::f(const Eigen::VectorXd& v) const {
  return bounds.km_inv * (bounds.kc * v.squaredNorm() + bounds.kg);
}

Eigen::VectorXd u1(const Eigen::VectorXd& zeta, const Eigen::VectorXd& u2v, const Eigen::VectorXd& v,
                   const RobustConfig& rc, double smooth_radius) {
  const double nz = zeta.norm();
  if (nz == 0.0) return Eigen::VectorXd::Zero(zeta.size());
  const double magnitude = rc.kappa / (1.0 - rc.epsilon) * (rc.epsilon * u2v.norm() + rc.f(v));
  return -magnitude / std::max(nz, smooth_radius) * zeta;
}

Eigen::VectorXd torque(const Eigen::VectorXd& u1v, const Eigen::VectorXd& u2v, const RobustConfig& rc) {
  return rc.M_hat * (u1v + u2v);
}

double domination_slack(const Eigen::VectorXd& q, const Eigen::VectorXd& v, const Eigen::VectorXd& zeta,
                        const Eigen::VectorXd& u1v, const Eigen::VectorXd& u2v, const ElPlant& plant,
                        const RobustConfig& rc) {
  const Eigen::MatrixXd M = plant.inertia(q);
  const Eigen::LLT<Eigen::MatrixXd> llt(M);
  const Eigen::Index m = q.size();
  const Eigen::MatrixXd perturb = rc.M_hat * llt.solve(Eigen::MatrixXd::Identity(m, m)) -
                                  Eigen::MatrixXd::Identity(m, m);
  const Eigen::VectorXd F = -llt.solve(plant.coriolis(q, v) + plant.gravity(q));
  const Eigen::VectorXd Z = u1v + perturb * (u1v + u2v) + F;
  return zeta.dot(Z);
}

ControlLaw::ControlLaw(const ControllerGains& gains, ControlMode mode, const RobustConfig& rc,
                       const Eigen::MatrixXd& E, const Eigen::MatrixXd& S, bool allow_uncertified,
                       double smooth_radius)
    : ledger_(make_ledger(gains, mode)),
      exps_(ControlExponents::from(gains.alpha, gains.beta)),
      rc_(rc),
      E_(E),
      ESS_(E * S * S),
      smooth_radius_(smooth_radius) {
  if (!ledger_.certified && !allow_uncertified) {
    std::string failed;
    for (const auto& s : ledger_.slack.entries) {
      if (s.slack <= 0.0) failed += (failed.empty() ? "" : ", ") + s.name;
    }
    throw UncertifiedGains("failed inequalities: " + failed + " (use allow_uncertified to override)");
  }
}

ControlOutput ControlLaw::compute(const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                                  const Eigen::VectorXd& eta_i, const Eigen::VectorXd& eta_dot_i) const {
  ControlOutput out;
  const Eigen::VectorXd q_bar = q - E_ * eta_i;
  const Eigen::VectorXd v_bar = v - E_ * eta_dot_i;
  out.eps = epsilon_var(q_bar, v_bar, ledger_.gamma1, ledger_.gamma2, exps_.alpha, exps_.beta);
  out.u2 = u2_terms(out.eps, ledger_.k1, ledger_.k2, exps_) + ESS_ * eta_i;
  out.zeta = sigpow(out.eps, exps_.two_minus_alpha.value());
  out.u1 = u1(out.zeta, out.u2, v, rc_, smooth_radius_);
  out.tau = torque(out.u1, out.u2, rc_);
  return out;
}

}  // namespace lagsync
