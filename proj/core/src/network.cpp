#include "lagsync/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

#include "lagsync/error.hpp"

namespace lagsync {

Digraph::Digraph(int n_followers, std::vector<Edge> edges)
    : n_followers_(n_followers), edges_(std::move(edges)) {
  if (n_followers_ < 1) throw InvalidGraph("need at least one follower");
  adjacency_ = Eigen::MatrixXd::Zero(n_followers_ + 1, n_followers_ + 1);
  for (const Edge& e : edges_) {
    const std::string tag = "edge [" + std::to_string(e.from) + ", " + std::to_string(e.to) + "]";
    if (e.from < 0 || e.from > n_followers_ || e.to < 0 || e.to > n_followers_) {
      throw InvalidGraph(tag + " references a node outside 0.." + std::to_string(n_followers_));
    }
    if (e.to == 0) throw InvalidGraph(tag + " points into the leader");
    if (e.from == e.to) throw InvalidGraph(tag + " is a self-loop");
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw InvalidGraph(tag + " has non-positive weight");
    }
    adjacency_(e.to, e.from) += e.weight;
  }
  in_neighbors_.resize(n_followers_ + 1);
  for (int i = 1; i <= n_followers_; ++i) {
    for (int j = 0; j <= n_followers_; ++j) {
      if (adjacency_(i, j) > 0.0) in_neighbors_[i].push_back({j, adjacency_(i, j)});
    }
  }
}

Eigen::MatrixXd laplacian(const Digraph& g) {
  const int n = g.n_followers();
  const Eigen::MatrixXd& a = g.adjacency();
  Eigen::MatrixXd H(n, n);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) H(i - 1, j - 1) = i == j ? a.row(i).sum() : -a(i, j);
  }
  return H;
}

bool has_root_spanning_tree(const Digraph& g) {
  const int n = g.n_followers();
  std::vector<bool> seen(n + 1, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  while (!frontier.empty()) {
    const int j = frontier.front();
    frontier.pop();
    for (int i = 1; i <= n; ++i) {
      if (!seen[i] && g.weight(i, j) > 0.0) {
        seen[i] = true;
        frontier.push(i);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool s) { return s; });
}

double scaled_min_eig(const Eigen::MatrixXd& H, const Eigen::VectorXd& d) {
  const Eigen::MatrixXd DH = d.asDiagonal() * H;
  const Eigen::MatrixXd Q = DH + DH.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

namespace {

// Coordinate ascent on lambda_min(H^T D + D H) over positive diagonals with
// mean(d) = 1, using multiplicative steps that shrink when no coordinate helps.
Eigen::VectorXd ascend_candidate(const Eigen::MatrixXd& H) {
  const Eigen::Index n = H.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  double best = scaled_min_eig(H, d);
  double step = 0.5;
  for (int sweep = 0; sweep < 2000 && step > 1e-12; ++sweep) {
    bool improved = false;
    for (Eigen::Index k = 0; k < n; ++k) {
      for (double factor : {1.0 + step, 1.0 / (1.0 + step)}) {
        Eigen::VectorXd trial = d;
        trial[k] *= factor;
        trial /= trial.mean();
        const double value = scaled_min_eig(H, trial);
        if (value > best) {
          best = value;
          d = trial;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (best > 1e-3) break;
  }
  if (!(best > 0.0)) {
    throw NoCandidateFound("coordinate ascent stalled at lambda_min = " + std::to_string(best));
  }
  return d;
}

}  // namespace

Eigen::VectorXd compute_scaling_D(const Eigen::MatrixXd& H, double tol) {
  if (H.rows() != H.cols() || H.rows() == 0) throw DimensionMismatch("H must be square");
  Eigen::EigenSolver<Eigen::MatrixXd> es(H, false);
  if (es.eigenvalues().real().minCoeff() <= 0.0) {
    throw NotRootReachable("H has an eigenvalue with non-positive real part");
  }
  const Eigen::Index n = H.rows();
  const Eigen::VectorXd w = H.transpose().partialPivLu().solve(Eigen::VectorXd::Ones(n));
  Eigen::VectorXd candidate;
  if (w.allFinite() && w.minCoeff() > 0.0 && scaled_min_eig(H, w) > 0.0) {
    candidate = w;
  } else {
    candidate = ascend_candidate(H);
  }
  const double lambda_m = scaled_min_eig(H, candidate);
  if (!(lambda_m > 0.0)) {
    throw NoCandidateFound("candidate sum is not positive definite");
  }
  Eigen::VectorXd D = 2.0 * candidate / lambda_m;
  if (scaled_min_eig(H, D) < 2.0 - tol) {
    throw NoCandidateFound("rescaled D misses lambda_min >= 2 by more than tol");
  }
  return D;
}

LaplacianBundle analyze_network(const Digraph& g, const std::optional<Eigen::VectorXd>& D_override,
                                double tol) {
  LaplacianBundle b;
  b.H = laplacian(g);
  b.root_reachable = has_root_spanning_tree(g);
  if (D_override) {
    if (D_override->size() != b.H.rows()) {
      throw DimensionMismatch("D_diag has " + std::to_string(D_override->size()) +
                              " entries, expected " + std::to_string(b.H.rows()));
    }
    if (D_override->minCoeff() <= 0.0) throw InvalidGraph("D_diag entries must be positive");
    b.D = *D_override;
    b.D_user_supplied = true;
  } else {
    if (!b.root_reachable) throw NotRootReachable("node 0 does not reach every follower");
    b.D = compute_scaling_D(b.H, tol);
  }
  b.min_eig = scaled_min_eig(b.H, b.D);
  b.D_verified = b.min_eig >= 2.0 - tol;
  return b;
}

Digraph default_topology(int n_followers) {
  std::vector<Edge> edges;
  for (int i = 1; i <= n_followers; ++i) edges.push_back({i - 1, i, 1.0});
  if (n_followers >= 4) edges.push_back({0, 4, 1.0});
  return Digraph(n_followers, std::move(edges));
}

}  // namespace lagsync
