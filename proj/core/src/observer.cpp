#include "lagsync/observer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lagsync/error.hpp"

namespace lagsync {

double kron_DS_norm(const Eigen::VectorXd& d, const Eigen::MatrixXd& S) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
  return d.cwiseAbs().maxCoeff() * svd.singularValues()(0);
}

void validate_observer_gains(const ObserverGains& gains, const Eigen::VectorXd& d,
                             const Eigen::MatrixXd& S) {
  const double ds = kron_DS_norm(d, S);
  if (!(gains.c1 > ds)) {
    throw GainConditionViolated("c1 > ||D (x) S|| fails: c1 = " + std::to_string(gains.c1) +
                                ", ||D (x) S|| = " + std::to_string(ds));
  }
  if (!(gains.c2 > 0.0)) throw GainConditionViolated("c2 > 0 fails");
  if (!(gains.c3 >= 0.0)) throw GainConditionViolated("c3 >= 0 fails");
  const double a = gains.a.value();
  if (!(a > 0.0 && a < 1.0)) throw GainConditionViolated("0 < a < 1 fails: a = " + gains.a.to_string());
  if (gains.fixed_time() && !(gains.b.value() > 1.0 / a)) {
    throw GainConditionViolated("b > 1/a fails: b = " + gains.b.to_string());
  }
}

Eigen::VectorXd innovation(const Eigen::VectorXd& eta_i, std::span<const NeighborEstimate> neighbors) {
  if (neighbors.empty()) throw IsolatedAgent("agent has no in-neighbours");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(eta_i.size());
  for (const auto& nb : neighbors) y += nb.weight * (eta_i - nb.eta);
  return y;
}

Eigen::VectorXd innovation(int i, const std::vector<Eigen::VectorXd>& eta_all, const Digraph& g) {
  const auto& in = g.in_neighbors(i);
  if (in.empty()) throw IsolatedAgent("agent " + std::to_string(i) + " has no in-neighbours");
  std::vector<NeighborEstimate> view;
  view.reserve(in.size());
  for (const auto& nb : in) view.push_back({nb.weight, eta_all.at(nb.node)});
  return innovation(eta_all.at(i), view);
}

namespace {

Eigen::VectorXd correction(const Eigen::VectorXd& y, const ObserverGains& gains) {
  Eigen::VectorXd Y = gains.c1 * y + gains.c2 * sigpow(y, gains.a);
  if (gains.c3 != 0.0) Y += gains.c3 * sigpow(y, gains.b);
  return Y;
}

}  // namespace

Eigen::VectorXd observer_rhs(const Eigen::VectorXd& eta_i, const Eigen::VectorXd& y_i,
                             const ObserverGains& gains, const Eigen::MatrixXd& S) {
  return S * eta_i - correction(y_i, gains);
}

Eigen::VectorXd innovation_dynamics(const Eigen::VectorXd& y, const Eigen::MatrixXd& H,
                                    const ObserverGains& gains, const Eigen::MatrixXd& S) {
  const Eigen::Index n = S.rows();
  const Eigen::Index N = H.rows();
  if (y.size() != n * N) throw DimensionMismatch("stacked y must have n*N entries");
  Eigen::VectorXd Y(y.size());
  Eigen::VectorXd out(y.size());
  for (Eigen::Index i = 0; i < N; ++i) {
    Y.segment(i * n, n) = correction(y.segment(i * n, n), gains);
    out.segment(i * n, n) = S * y.segment(i * n, n);
  }
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      if (H(i, j) != 0.0) out.segment(i * n, n) -= H(i, j) * Y.segment(j * n, n);
    }
  }
  return out;
}

ObserverConstants observer_constants(const ObserverGains& gains, const Eigen::VectorXd& d,
                                     const Eigen::MatrixXd& S, int n, int N) {
  validate_observer_gains(gains, d, S);
  ObserverConstants k;
  k.ds_norm = kron_DS_norm(d, S);
  k.d_max = d.maxCoeff();
  k.fixed_time = gains.fixed_time();

  const double a = gains.a.value();
  const double b = gains.b.value();
  const double nN = static_cast<double>(n) * N;
  const double p = 2.0 * a / (1.0 + a);
  const double w1 = gains.c1 * k.d_max / 2.0;
  const double w2 = gains.c2 * k.d_max / (1.0 + a);

  k.c_hat1 = std::min(0.5 * (gains.c1 * gains.c1 - k.ds_norm * k.ds_norm), 0.5 * gains.c2 * gains.c2);
  k.c_hat2 = std::max(std::pow(w1, p) * std::pow(nN, 1.0 - p), std::pow(w2, p) * std::pow(nN, 1.0 - a));

  if (!k.fixed_time) {
    k.T1_star = std::numeric_limits<double>::infinity();
    return k;
  }

  const double w3 = gains.c3 * k.d_max / (1.0 + b);
  const double q = 2.0 * b / (1.0 + b);
  k.c_hat1 = std::min(k.c_hat1, gains.c3 * gains.c3 / (2.0 * std::pow(nN, b - 1.0)));
  k.c_hat2 = std::max(k.c_hat2, std::pow(w3, p));
  k.c_hat3 = std::max({std::pow(w1, q), std::pow(w2, q), std::pow(w3, q)}) *
             std::pow(3.0 * nN, (b - 1.0) / (b + 1.0));
  k.T1_star = 4.0 * k.c_hat2 * (a + 1.0) / (k.c_hat1 * (1.0 - a)) +
              4.0 * k.c_hat3 * (b + 1.0) / (k.c_hat1 * (b - 1.0));
  return k;
}

double finite_time_bound(const ObserverConstants& k, const ObserverGains& gains,
                         const Eigen::VectorXd& d, const Eigen::VectorXd& y0) {
  const double a = gains.a.value();
  const double V0 = lyapunov_V(y0, gains, d);
  return 3.0 * k.c_hat2 * (a + 1.0) * std::pow(V0, 1.0 - 2.0 * a / (1.0 + a)) /
         (k.c_hat1 * (1.0 - a));
}

double lyapunov_V(const Eigen::VectorXd& y, const ObserverGains& gains, const Eigen::VectorXd& d) {
  const Eigen::Index N = d.size();
  if (N == 0 || y.size() % N != 0) throw DimensionMismatch("stacked y does not split into N agents");
  const Eigen::Index n = y.size() / N;
  const double a = gains.a.value();
  const double b = gains.b.value();
  double V = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const auto yi = y.segment(i * n, n);
    double agent = gains.c2 / (1.0 + a) * abspow(yi, 1.0 + a).sum() + 0.5 * gains.c1 * yi.squaredNorm();
    if (gains.c3 != 0.0) agent += gains.c3 / (1.0 + b) * abspow(yi, 1.0 + b).sum();
    V += d[i] * agent;
  }
  return V;
}

}  // namespace lagsync
