#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace lagsync {

/// Directed edge from -> to carrying weight a_{to,from} > 0. Node 0 is the leader.
struct Edge {
  int from = 0;
  int to = 1;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// An in-neighbour of some follower: node id and the weight of the link into it.
struct InNeighbor {
  int node = 0;
  double weight = 0.0;
};

/**
 * @brief Leader-follower communication digraph on nodes {0, 1, ..., N}.
 *
 * Node 0 is the leader and never receives information. Construction
 * validates the edge list; parallel edges are merged by summing weights.
 */
class Digraph {
 public:
  Digraph() = default;
  /// Throws InvalidGraph on self-loops, non-positive weights, edges into node 0
  /// or node ids outside 0..N.
  Digraph(int n_followers, std::vector<Edge> edges);

  int n_followers() const noexcept { return n_followers_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Weight a_ij of the link j -> i (0 when absent). i, j in 0..N.
  double weight(int i, int j) const { return adjacency_(i, j); }
  /// (N+1)x(N+1) matrix [a_ij].
  const Eigen::MatrixXd& adjacency() const noexcept { return adjacency_; }
  /// In-neighbours of follower i, in ascending node order.
  const std::vector<InNeighbor>& in_neighbors(int i) const { return in_neighbors_.at(i); }

  friend bool operator==(const Digraph& l, const Digraph& r) {
    return l.n_followers_ == r.n_followers_ && l.edges_ == r.edges_;
  }

 private:
  int n_followers_ = 0;
  std::vector<Edge> edges_;
  Eigen::MatrixXd adjacency_;
  std::vector<std::vector<InNeighbor>> in_neighbors_;
};

/// Follower-subnetwork Laplacian: h_ii = sum_{j=0..N} a_ij, h_ij = -a_ij.
Eigen::MatrixXd laplacian(const Digraph& g);

/// True iff every follower is reachable from node 0 along directed edges.
bool has_root_spanning_tree(const Digraph& g);

/// Smallest eigenvalue of H^T D + D H for diagonal D = diag(d).
double scaled_min_eig(const Eigen::MatrixXd& H, const Eigen::VectorXd& d);

/**
 * @brief Positive diagonal D (returned as its diagonal) with
 * lambda_min(H^T D + D H) = 2.
 *
 * The candidate is diag(w) with H^T w = 1 when that w is strictly positive,
 * otherwise a projected coordinate ascent on lambda_min from the identity.
 * The candidate is then rescaled by 2 / lambda_min.
 *
 * Throws NotRootReachable when some eigenvalue of H has real part <= 0 and
 * NoCandidateFound when the ascent cannot reach a positive definite sum.
 */
Eigen::VectorXd compute_scaling_D(const Eigen::MatrixXd& H, double tol = 1e-9);

struct LaplacianBundle {
  Eigen::MatrixXd H;
  Eigen::VectorXd D;       ///< diagonal of the scaling matrix
  double min_eig = 0.0;    ///< lambda_min(H^T D + D H)
  bool root_reachable = false;
  bool D_user_supplied = false;
  bool D_verified = false; ///< min_eig >= 2 - tol
};

/// Laplacian, reachability and scaling matrix. A user-supplied D is verified,
/// never adjusted; a failed verification is reported through D_verified.
LaplacianBundle analyze_network(const Digraph& g,
                                const std::optional<Eigen::VectorXd>& D_override = std::nullopt,
                                double tol = 1e-9);

/// Chain 0->1->...->N with unit weights plus the shortcut 0->4 (for N >= 4).
Digraph default_topology(int n_followers = 6);

}  // namespace lagsync
