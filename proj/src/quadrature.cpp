#include "logfield/quadrature.hpp"
#include <cstdio>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "logfield/errors.hpp"

namespace logfield::quad {

namespace {

using GK15 = boost::math::quadrature::gauss_kronrod<double, 15>;

struct Panel {
  double err;
  double val;
  double lo;
  double hi;
  bool operator<(const Panel& other) const { return err < other.err; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double lo, double hi) {
  double err = 0.0;
  double val = GK15::integrate(f, lo, hi, 0, 0.0, &err);
  err *= 0.5 * (hi - lo);  // boost reports the error of the unit-normalized panel
  if (!std::isfinite(val)) {
    val = 0.0;
    err = std::numeric_limits<double>::infinity();
  }
  return Panel{err, val, lo, hi};
}

// Priority-queue refinement: always bisect the panel with the largest error
// estimate until the summed estimate meets abs_tol + rel_tol * |I|.
double adaptive_on_segments(const std::function<double(double)>& f,
                            const std::vector<std::pair<double, double>>& segments,
                            const QuadratureSpec& spec) {
  std::priority_queue<Panel> panels;
  double total = 0.0;
  double total_err = 0.0;
  for (const auto& [lo, hi] : segments) {
    Panel p = evaluate_panel(f, lo, hi);
    total += p.val;
    total_err += p.err;
    panels.push(p);
  }

  int splits = 0;
  while (total_err > spec.abs_tol + spec.rel_tol * std::abs(total)) {
    if (splits >= spec.max_subdivisions) {
      char msg[160];
      std::snprintf(msg, sizeof(msg),
                    "integrate_1d: error %.3e (target %.3e) after %d subdivisions; worst panel "
                    "[%.6e, %.6e] err %.3e",
                    total_err, spec.abs_tol + spec.rel_tol * std::abs(total), splits,
                    panels.top().lo, panels.top().hi, panels.top().err);
      throw NonConvergence(msg);
    }
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(worst.lo < mid && mid < worst.hi)) {
      // interval no longer splittable in double precision; accept it as is
      total_err -= worst.err;
      panels.push(Panel{0.0, worst.val, worst.lo, worst.hi});
      continue;
    }
    Panel left = evaluate_panel(f, worst.lo, mid);
    Panel right = evaluate_panel(f, mid, worst.hi);
    total += left.val + right.val - worst.val;
    total_err += left.err + right.err - worst.err;
    panels.push(left);
    panels.push(right);
    ++splits;
  }
  return total;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("QuadratureSpec: tolerances must be > 0");
  if (max_subdivisions < 1) throw DomainError("QuadratureSpec: max_subdivisions must be >= 1");
}

double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const QuadratureSpec& spec) {
  spec.validate();
  if (!(a < b)) throw DomainError("integrate_1d: requires a < b");

  std::vector<double> cuts{a, b};
  for (double s : spec.singularity_points) {
    if (s > a && s < b) cuts.push_back(s);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<std::pair<double, double>> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) segments.emplace_back(cuts[i], cuts[i + 1]);
  return adaptive_on_segments(f, segments, spec);
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec, double tail_decay) {
  spec.validate();
  if (!(tail_decay > 1.0)) throw DomainError("integrate_semi_infinite: tail_decay must be > 1");

  const auto envelope = [&](double lo, double hi) {
    // max of |f(k)| k^p over log-spaced probes in [lo, hi]
    double c = 0.0;
    constexpr int kProbes = 24;
    for (int i = 0; i <= kProbes; ++i) {
      const double k = lo * std::pow(hi / lo, static_cast<double>(i) / kProbes);
      c = std::max(c, std::abs(f(k)) * std::pow(k, tail_decay));
    }
    return c;
  };

  double truncation = 16.0;
  for (;;) {
    const double c_here = envelope(truncation, 2.0 * truncation);
    const double c_next = envelope(2.0 * truncation, 4.0 * truncation);
    if (c_next > 2.0 * c_here + spec.abs_tol) {
      throw TailBoundViolation("integrate_semi_infinite: |f| k^p grows past k = " +
                               std::to_string(truncation));
    }
    const double bound =
        std::max(c_here, c_next) * std::pow(truncation, 1.0 - tail_decay) / (tail_decay - 1.0);
    if (bound <= spec.abs_tol) break;
    truncation *= 2.0;
    if (truncation > 1e12) {
      throw NonConvergence("integrate_semi_infinite: tail bound never reached abs_tol");
    }
  }
  return integrate_1d(f, 0.0, truncation, spec);
}

DiagonalRule log_diagonal_rule() {
  return DiagonalRule{[](double t) { return t == 0.0 ? 0.0 : t - t * std::log(std::abs(t)); }};
}

DiagonalRule abs_diagonal_rule() {
  return DiagonalRule{[](double t) { return 0.5 * t * std::abs(t); }};
}

DiagonalRule power_diagonal_rule(double alpha) {
  if (!(alpha > -1.0)) throw DomainError("power_diagonal_rule: needs alpha > -1");
  return DiagonalRule{[alpha](double t) {
    if (t == 0.0) return 0.0;
    const double mag = std::pow(std::abs(t), alpha + 1.0) / (alpha + 1.0);
    return t > 0.0 ? mag : -mag;
  }};
}

namespace {

// 5-point Gauss-Legendre on [-1, 1]
struct GL5 {
  double node[5];
  double weight[5];
  GL5() {
    using G = boost::math::quadrature::gauss<double, 5>;
    const auto& half_nodes = G::abscissa();  // nonnegative half
    const auto& half_weights = G::weights();
    node[0] = -half_nodes[2];
    node[1] = -half_nodes[1];
    node[2] = half_nodes[0];
    node[3] = half_nodes[1];
    node[4] = half_nodes[2];
    weight[0] = half_weights[2];
    weight[1] = half_weights[1];
    weight[2] = half_weights[0];
    weight[3] = half_weights[1];
    weight[4] = half_weights[2];
  }
};

}  // namespace

double double_integral_oracle(const std::function<double(double, double)>& kernel,
                              double a, double b, double c, double d, int n,
                              const std::optional<DiagonalRule>& diagonal) {
  if (n < 2) throw DomainError("double_integral_oracle: n must be >= 2");
  if (!(a < b) || !(c < d)) throw DomainError("double_integral_oracle: empty rectangle");

  static const GL5 gl;
  const double hx = (b - a) / n;
  const double hy = (d - c) / n;
  const double band = std::max(hx, hy);

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x0 = a + i * hx;
    const double x1 = (i + 1 == n) ? b : x0 + hx;
    for (int j = 0; j < n; ++j) {
      const double y0 = c + j * hy;
      const double y1 = (j + 1 == n) ? d : y0 + hy;
      // gap between the cell's x and y projections; <= band means the cell is
      // on or next to the diagonal x = y
      const double gap = std::max({y0 - x1, x0 - y1, 0.0});
      if (diagonal && gap <= band) {
        const auto& phi = diagonal->antiderivative;
        const auto inner_exact = [&](double x) { return phi(x - y0) - phi(x - y1); };
        QuadratureSpec cell_spec;
        cell_spec.abs_tol = 1e-14;
        cell_spec.rel_tol = 1e-11;
        cell_spec.max_subdivisions = 4000;
        cell_spec.singularity_points = {y0, y1};
        sum += integrate_1d(inner_exact, x0, x1, cell_spec);
      } else {
        const double cx = 0.5 * (x0 + x1), mx = 0.5 * (x1 - x0);
        const double cy = 0.5 * (y0 + y1), my = 0.5 * (y1 - y0);
        double cell = 0.0;
        for (int p = 0; p < 5; ++p) {
          const double x = cx + mx * gl.node[p];
          double row = 0.0;
          for (int q = 0; q < 5; ++q) row += gl.weight[q] * kernel(x, cy + my * gl.node[q]);
          cell += gl.weight[p] * row;
        }
        sum += cell * mx * my;
      }
    }
  }
  return sum;
}

}  // namespace logfield::quad
