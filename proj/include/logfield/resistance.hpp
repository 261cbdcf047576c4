#pragma once

#include "logfield/errors.hpp"

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "logfield/rng.hpp"

namespace logfield::resistance {

struct Edge {
  int i = 0;
  int j = 0;
  double weight = 1.0;  // conductance; unit resistors have weight 1
};

/// Weighted undirected graph; no self-loops, connected (checked at
/// construction).
class Graph {
 public:
  Graph(int n, std::vector<Edge> edges);

  /// Edge-list text format: one "i j weight" per line, zero-based indices,
  /// '#' starts a comment, weight optional (default 1). ParseError carries
  /// the offending line number.
  static Graph from_edge_list(std::istream& in);

  int size() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  int n_;
  std::vector<Edge> edges_;
};

/// K = degree - adjacency under the single-count convention: the power
/// dissipated by potentials phi is sum over edges of w (phi_i - phi_j)^2
/// = phi^T K phi, so a single unit resistor has R = 1. K is symmetric PSD
/// with K (1,...,1)^T = 0.
Eigen::MatrixXd laplacian(const Graph& g);

/// Constrained pseudoinverse: K G = I - (1/n) c c^T and G c = 0, solved
/// through the augmented symmetric system (K with the zero-sum constraint
/// adjoined). Throws RankDeficiency unless the nullspace is exactly span{c}.
Eigen::MatrixXd pseudoinverse_G(const Eigen::MatrixXd& K);

/// Effective resistance R_kl = G_kk + G_ll - 2 G_kl (the Gaussian variance of
/// phi_k - phi_l).
double resistance(const Eigen::MatrixXd& G, int k, int l);

Eigen::MatrixXd resistance_matrix(const Eigen::MatrixXd& G);

/// 1 / min power with phi_k - phi_l = 1, via the Lagrange linear system.
/// Throws SingularSystem if the system cannot be solved.
double variational_resistance(const Graph& g, int k, int l);

struct McEstimate {
  double estimate = 0.0;
  double stderr_est = 0.0;
  long samples = 0;
};

/// Monte Carlo variance of phi_k - phi_l under the density proportional to
/// exp(-phi^T K phi / 2) on the zero-sum subspace (sampled through the
/// eigendecomposition of K restricted to c-perp).
McEstimate gaussian_variance_mc(const Graph& g, int k, int l, long samples, RngStream& rng);

struct MetricCheckReport {
  bool r_satisfied = true;
  bool sqrt_r_satisfied = true;
  double worst_r_slack = 0.0;       // min over triples of R_ik + R_kj - R_ij
  double worst_sqrt_slack = 0.0;
  long triples = 0;
};

/// Triangle inequality over all triples, for R and for sqrt(R).
MetricCheckReport metric_check(const Eigen::MatrixXd& R);

struct ResistanceResult {
  Eigen::MatrixXd G;
  Eigen::MatrixXd R;
  double defining_residual = 0.0;  // ||K G - (I - cc^T/n)||_inf
  double row_sum_residual = 0.0;   // max |sum_i G_ij|
};

ResistanceResult solve(const Graph& g);

/// CSV matrix dump, full precision, one row per line.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace logfield::resistance
