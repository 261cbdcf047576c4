#include "logfield/resistance.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "logfield/errors.hpp"

namespace logfield::resistance {

Graph::Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ < 2) throw DomainError("Graph: need at least two vertices");
  for (const Edge& e : edges_) {
    if (e.i < 0 || e.i >= n_ || e.j < 0 || e.j >= n_) throw DomainError("Graph: vertex out of range");
    if (e.i == e.j) throw DomainError("Graph: self-loops not allowed");
    if (!(e.weight > 0.0)) throw DomainError("Graph: edge weights must be > 0");
  }
  // connectivity by union-find
  std::vector<int> parent(n_);
  for (int i = 0; i < n_; ++i) parent[i] = i;
  const auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const Edge& e : edges_) parent[find(e.i)] = find(e.j);
  const int root = find(0);
  for (int i = 1; i < n_; ++i) {
    if (find(i) != root) throw DisconnectedGraph("Graph: vertex " + std::to_string(i) + " unreachable");
  }
}

Graph Graph::from_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  int max_vertex = -1;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    long long i = 0, j = 0;
    double w = 1.0;
    if (!(fields >> i)) continue;  // blank or comment-only line
    if (!(fields >> j)) throw ParseError("expected 'i j [weight]'", line_number);
    if (!(fields >> w)) w = 1.0;
    std::string rest;
    if (fields >> rest) throw ParseError("trailing tokens after edge", line_number);
    if (i < 0 || j < 0) throw ParseError("negative vertex index", line_number);
    if (i == j) throw ParseError("self-loop", line_number);
    if (!(w > 0.0)) throw ParseError("nonpositive weight", line_number);
    edges.push_back(Edge{static_cast<int>(i), static_cast<int>(j), w});
    max_vertex = std::max<long long>(max_vertex, std::max(i, j));
  }
  if (edges.empty()) throw ParseError("no edges in input", line_number);
  return Graph(max_vertex + 1, std::move(edges));
}

Eigen::MatrixXd laplacian(const Graph& g) {
  const int n = g.size();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    k(e.i, e.i) += e.weight;
    k(e.j, e.j) += e.weight;
    k(e.i, e.j) -= e.weight;
    k(e.j, e.i) -= e.weight;
  }
  return k;
}

Eigen::MatrixXd pseudoinverse_G(const Eigen::MatrixXd& K) {
  const auto n = K.rows();
  if (K.cols() != n || n < 2) throw DomainError("pseudoinverse_G: K must be square, n >= 2");
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + K.cwiseAbs().maxCoeff())) {
    throw DomainError("pseudoinverse_G: K must be symmetric");
  }

  // augmented KKT system [[K, c], [c^T, 0]]; nonsingular iff nullspace(K) = span{c}
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = K;
  aug.topRightCorner(n, 1).setOnes();
  aug.bottomLeftCorner(1, n).setOnes();

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n + 1, n);
  rhs.topRows(n) = Eigen::MatrixXd::Identity(n, n) -
                   Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));

  Eigen::FullPivLU<Eigen::MatrixXd> lu(aug);
  if (!lu.isInvertible()) throw RankDeficiency("pseudoinverse_G: nullspace is not span{c}");
  Eigen::MatrixXd g = lu.solve(rhs).topRows(n);
  g = 0.5 * (g + g.transpose()).eval();

  const double scale = 1.0 + K.cwiseAbs().maxCoeff();
  const double residual = (K * g - rhs.topRows(n)).cwiseAbs().maxCoeff();
  const double row_sum = g.colwise().sum().cwiseAbs().maxCoeff();
  if (residual > 1e-10 * scale || row_sum > 1e-10 * scale) {
    throw RankDeficiency("pseudoinverse_G: defining equations violated, residual " +
                         std::to_string(residual));
  }
  return g;
}

double resistance(const Eigen::MatrixXd& G, int k, int l) {
  if (k < 0 || l < 0 || k >= G.rows() || l >= G.rows()) throw DomainError("resistance: bad index");
  return G(k, k) + G(l, l) - 2.0 * G(k, l);
}

Eigen::MatrixXd resistance_matrix(const Eigen::MatrixXd& G) {
  const auto n = G.rows();
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    r(k, k) = 0.0;
    for (Eigen::Index l = k + 1; l < n; ++l) r(k, l) = r(l, k) = resistance(G, k, l);
  }
  return r;
}

double variational_resistance(const Graph& g, int k, int l) {
  const int n = g.size();
  if (k < 0 || l < 0 || k >= n || l >= n || k == l) {
    throw DomainError("variational_resistance: bad vertex pair");
  }
  // stationarity 2 K phi + lambda (e_k - e_l) = 0 with phi_k - phi_l = 1 and
  // the gauge sum_i phi_i = 0 adjoined
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(n + 2, n + 2);
  sys.topLeftCorner(n, n) = 2.0 * laplacian(g);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(k) = 1.0;
  b(l) = -1.0;
  sys.block(0, n, n, 1) = b;
  sys.block(n, 0, 1, n) = b.transpose();
  sys.block(0, n + 1, n, 1).setOnes();
  sys.block(n + 1, 0, 1, n).setOnes();

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
  rhs(n) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
  if (!lu.isInvertible()) throw SingularSystem("variational_resistance: singular Lagrange system");
  const Eigen::VectorXd sol = lu.solve(rhs);
  const Eigen::VectorXd phi = sol.head(n);

  double power = 0.0;
  for (const Edge& e : g.edges()) {
    const double d = phi(e.i) - phi(e.j);
    power += e.weight * d * d;
  }
  if (!(power > 0.0)) throw SingularSystem("variational_resistance: zero dissipated power");
  return 1.0 / power;
}

McEstimate gaussian_variance_mc(const Graph& g, int k, int l, long samples, RngStream& rng) {
  const int n = g.size();
  if (samples < 100) throw DomainError("gaussian_variance_mc: samples must be >= 100");
  if (k < 0 || l < 0 || k >= n || l >= n) throw DomainError("gaussian_variance_mc: bad index");

  const Eigen::MatrixXd K = laplacian(g);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double max_eig = values(n - 1);
  int zero_count = 0;
  for (int i = 0; i < n; ++i) {
    if (values(i) < 1e-10 * max_eig) ++zero_count;
  }
  if (zero_count != 1) throw RankDeficiency("gaussian_variance_mc: nullspace dimension != 1");

  // phi = sum over positive modes of v_i z_i / sqrt(lambda_i); row of the
  // difference functional is all we need
  Eigen::VectorXd weights(n - 1);
  for (int i = 1; i < n; ++i) {
    weights(i - 1) = (eig.eigenvectors()(k, i) - eig.eigenvectors()(l, i)) / std::sqrt(values(i));
  }

  double sum = 0.0, sum_sq = 0.0;
  for (long s = 0; s < samples; ++s) {
    double diff = 0.0;
    for (int i = 0; i < n - 1; ++i) diff += weights(i) * rng.normal();
    const double v = diff * diff;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double var_of_v = std::max(0.0, sum_sq / samples - mean * mean);
  McEstimate est;
  est.estimate = mean;
  est.stderr_est = std::sqrt(var_of_v / samples);
  est.samples = samples;
  return est;
}

MetricCheckReport metric_check(const Eigen::MatrixXd& R) {
  const auto n = R.rows();
  MetricCheckReport report;
  report.worst_r_slack = std::numeric_limits<double>::infinity();
  report.worst_sqrt_slack = std::numeric_limits<double>::infinity();
  const double tol = 1e-12 * (1.0 + R.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        ++report.triples;
        const double slack = R(i, k) + R(k, j) - R(i, j);
        const double sqrt_slack = std::sqrt(R(i, k)) + std::sqrt(R(k, j)) - std::sqrt(R(i, j));
        report.worst_r_slack = std::min(report.worst_r_slack, slack);
        report.worst_sqrt_slack = std::min(report.worst_sqrt_slack, sqrt_slack);
        if (slack < -tol) report.r_satisfied = false;
        if (sqrt_slack < -tol) report.sqrt_r_satisfied = false;
      }
    }
  }
  if (report.triples == 0) {
    report.worst_r_slack = 0.0;
    report.worst_sqrt_slack = 0.0;
  }
  return report;
}

ResistanceResult solve(const Graph& g) {
  const Eigen::MatrixXd K = laplacian(g);
  ResistanceResult result;
  result.G = pseudoinverse_G(K);
  result.R = resistance_matrix(result.G);
  const auto n = K.rows();
  const Eigen::MatrixXd target = Eigen::MatrixXd::Identity(n, n) -
                                 Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  result.defining_residual = (K * result.G - target).cwiseAbs().maxCoeff();
  result.row_sum_residual = result.G.colwise().sum().cwiseAbs().maxCoeff();
  return result;
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  char buf[48];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf << (j + 1 < m.cols() ? "," : "\n");
    }
  }
}

}  // namespace logfield::resistance
