#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "logfield/quadrature.hpp"

namespace logfield::kernels {

enum class Family { Log1D, BrownianMA, PowerLaw, Log3D, BrownianWalk };

std::string family_name(Family f);
Family family_from_name(const std::string& name);  // throws DomainError

/// Which field the variogram rho^2(r) describes. width_s is the averaging
/// window width (sphere radius for Log3D); alpha only applies to PowerLaw,
/// with alpha in (-2, 0) or (0, inf).
struct CovarianceModel {
  Family family = Family::Log1D;
  double alpha = 0.0;
  double width_s = 1.0;

  static CovarianceModel log1d(double s = 1.0) { return {Family::Log1D, 0.0, s}; }
  static CovarianceModel brownian_ma(double s = 1.0) { return {Family::BrownianMA, 0.0, s}; }
  static CovarianceModel power_law(double alpha, double s = 1.0) {
    return {Family::PowerLaw, alpha, s};
  }
  static CovarianceModel log3d(double t = 1.0) { return {Family::Log3D, 0.0, t}; }
  static CovarianceModel brownian_walk() { return {Family::BrownianWalk, 0.0, 1.0}; }

  void validate() const;  // throws DomainError
};

enum class SmallRAsymptote {
  RSqrtLog,                // rho ~ r sqrt(-log r)
  Linear,                  // rho ~ r
  PowerHalfAlphaPlusOne,   // rho ~ r^(alpha/2 + 1)
  SqrtRLog,                // rho ~ sqrt(r log(1/r))
  SqrtR,                   // rho ~ sqrt(r)
};

std::string asymptote_name(SmallRAsymptote a);

/// rho(r) tabulated on a grid, with exact evaluation off the grid.
/// Invariants checked at construction: rho >= 0, rho(0+) -> 0, nondecreasing
/// over the small-r range, subadditive on the grid up to tolerance.
class MetricProfile {
 public:
  MetricProfile(CovarianceModel model, std::vector<double> r_grid);

  const CovarianceModel& model() const { return model_; }
  const std::vector<double>& r_grid() const { return r_grid_; }
  const std::vector<double>& rho_values() const { return rho_values_; }
  SmallRAsymptote small_r_asymptote() const { return asymptote_; }

  /// rho at any r >= 0 (closed form for all families; dense interpolation of
  /// the quadrature kernel for Log3D).
  double rho(double r) const;
  double rho2(double r) const;

 private:
  CovarianceModel model_;
  std::vector<double> r_grid_;
  std::vector<double> rho_values_;
  SmallRAsymptote asymptote_;
  // Log3D only: dense log-spaced table of G(r) for off-grid evaluation
  std::vector<double> g3d_log_r_;
  std::vector<double> g3d_values_;
};

/// L(r) = (1/2) r^2 log r^2, the antiderivative building block of the
/// log-kernel double integral. Even in r; L(0) = 0 by continuity.
double L(double r);

/// Closed form of F(a,b,c,d) = -int_a^b dx int_c^d dy log|x - y|
/// = (3/2)(a-b)(c-d) + (1/2)[L(c-a) - L(d-a) - L(c-b) + L(d-b)].
double F_log(double a, double b, double c, double d);

/// F(la, lb, lc, ld) - l^2 F(a,b,c,d) + l^2 (b-a)(d-c) log l. Zero up to
/// roundoff: rescaling costs an additive anomaly of exactly
/// l^2 (b-a)(d-c) log l. (The l^2 on the log term follows from
/// L(l r) = l^2 L(r) + l^2 r^2 log l by change of variables.)
double scale_anomaly_check(double a, double b, double c, double d, double lambda);

/// Variogram of the moving average of the 1D log-correlated field, in
/// window-width units: L(r+1) + L(r-1) - 2 L(r). Independent of the window
/// width s. Small r: ~ r^2 (3 - log r^2).
double rho2_log1d(double r);

/// Variogram of the width-s moving average of Brownian motion at center
/// separation r. Piecewise, continuous at r = s:
///   r <= s: 2 r^2 / s - 2 r^3 / (3 s^2)
///   r >= s: 2 r - 2 s / 3
/// Scaling law: rho2(l r; l s) = l rho2(r; s).
double rho2_brownian_ma(double r, double s);

/// Variogram of the width-s moving average of the power-law correlated field,
/// kernel |x - y|^alpha. Evaluated through the second antiderivative
/// K2(t) (K2'' = |t|^alpha), which is the finite-part value for
/// alpha <= -1 where the raw double integral diverges; alpha = -1 uses its
/// own branch K2 = |t| log|t|. Sign fixed so rho2 >= 0.
double rho2_powerlaw(double r, double alpha, double s);

/// Radial kernel of the 3D log-correlated field averaged over unit spheres:
/// G(r) = int_0^inf dk k^-7 (sin k - k cos k)^2 (1 - sin(kr)/(kr)).
/// The full variance is 2^6 pi^4 G(r). G(0) = 0; G(r)/r^2 tends to
/// g3d_small_r_constant() as r -> 0; G grows logarithmically at large r.
double G_3d(double r);

/// C3 = int_0^inf (sin k - k cos k)^2 / (6 k^5) dk, the small-r limit of
/// G(r)/r^2. Computed by quadrature once and cached.
double g3d_small_r_constant();

/// Variogram dispatch for any model.
double rho2(const CovarianceModel& model, double r);

MetricProfile metric_profile(const CovarianceModel& model, std::vector<double> r_grid);

/// CSV with a '#'-prefixed JSON metadata line, columns r, rho, rho2.
void write_profile_csv(std::ostream& out, const MetricProfile& profile);

}  // namespace logfield::kernels
