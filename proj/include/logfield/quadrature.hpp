#pragma once

#include "logfield/errors.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace logfield::quad {

/// Tolerances and budget for the adaptive integrators. The achieved error
/// target is abs_tol + rel_tol * |I|; integration splits up front at any
/// declared singularity points that fall inside the range.
struct QuadratureSpec {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  int max_subdivisions = 20000;
  std::vector<double> singularity_points{};

  void validate() const;  // throws DomainError
};

/// Adaptive Gauss-Kronrod integration of f over [a, b]. Integrable endpoint
/// singularities (log or power) are fine: quadrature nodes are interior and
/// subdivision concentrates panels toward the singular point.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    const QuadratureSpec& spec = {});

/// Integral of f over (0, inf) given |f(k)| <= C/k^tail_decay for large k with
/// tail_decay > 1. The truncation point is pushed out until the analytic tail
/// bound (with C estimated by probing) drops below abs_tol.
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec, double tail_decay);

/// First antiderivative Phi of a difference kernel profile, Phi'(t) = g(t)
/// where kernel(x, y) = g(x - y). Lets the oracle integrate cells that touch
/// the diagonal x = y exactly in the inner variable instead of sampling
/// across the singularity.
struct DiagonalRule {
  std::function<double(double)> antiderivative;
};

DiagonalRule log_diagonal_rule();                  // g(t) = -log|t|
DiagonalRule abs_diagonal_rule();                  // g(t) = |t|
DiagonalRule power_diagonal_rule(double alpha);    // g(t) = |t|^alpha, alpha > -1

/// Brute-force tensor-product estimate of the double integral of kernel over
/// [a,b] x [c,d] on an n x n cell grid. Cells near the diagonal use the
/// supplied DiagonalRule (exact inner integral, adaptive outer); everything
/// else is fixed-order Gauss-Legendre. Converges to the true value as n grows.
double double_integral_oracle(const std::function<double(double, double)>& kernel,
                              double a, double b, double c, double d, int n,
                              const std::optional<DiagonalRule>& diagonal = std::nullopt);

}  // namespace logfield::quad
