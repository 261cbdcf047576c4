#pragma once

#include "logfield/errors.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "logfield/kernels.hpp"
#include "logfield/rng.hpp"
#include "logfield/sampling.hpp"

namespace logfield::regularity {

using kernels::MetricProfile;

/// Covering counts of [0,1] in the profile metric, tabulated on a decreasing
/// eps grid, plus a continuous log N(eps) evaluator used by the Dudley
/// integral (floor steps replaced by the smooth surrogate, and the family
/// asymptote below the resolvable range).
struct CoveringProfile {
  std::vector<double> eps_grid;
  std::vector<long long> counts;
  double diameter = 0.0;
  std::function<double(double)> log_count;
};

/// Euclidean half-width rho^{-1}(eps); analytic for the raw Brownian metric,
/// bisection otherwise. Requires eps < rho(1).
double rho_inverse(const MetricProfile& profile, double eps);

/// Open-ball covering number of the unit interval: each rho-ball of radius
/// eps covers a Euclidean interval of half-width h = rho^{-1}(eps), and
/// N(eps) = 1 + Floor(1/(2h)). For Brownian d(r) = sqrt(r) this is exactly
/// 1 + Floor(1/(2 eps^2)).
long long covering_number(const MetricProfile& profile, double eps);

CoveringProfile covering_profile(const MetricProfile& profile, double eps_min,
                                 int points_per_decade = 16);

/// Dudley integral J(delta) = int_0^delta sqrt(log N(eps)) d eps for
/// 0 <= delta < D. The eps -> 0 endpoint is integrable (square-root-log
/// growth) and handled by adaptive subdivision plus the profile's asymptote.
double dudley_integral(const CoveringProfile& covering, double delta);

/// Closed-form modulus shapes. The first three are the paper families; the
/// last two are the deliberately weaker comparison moduli used by the
/// refinement study.
enum class ModulusForm {
  RLogInv,      // r log(1/r)
  SqrtRLogInv,  // sqrt(r log(1/r))
  PowerLog,     // r^(alpha/2+1) log(1/r)
  PlainR,       // r
  SqrtR,        // sqrt(r)
};

std::string modulus_form_name(ModulusForm f);

/// omega(r): either the tabulated Dudley pipeline output J(rho(r)) with its
/// closed-form descriptor, or a pure analytic form.
struct Modulus {
  std::vector<double> r_grid;
  std::vector<double> omega_values;
  ModulusForm closed_form = ModulusForm::RLogInv;
  double power_alpha = 0.0;  // PowerLog exponent parameter
  bool analytic = false;

  static Modulus analytic_form(ModulusForm form, double power_alpha = 0.0);

  /// omega at r > 0; tabulated moduli interpolate log-log inside the grid.
  double eval(double r) const;
};

/// omega(r) = J(rho(r)) tabulated on the profile grid (all grid points must
/// satisfy rho(r) < D). closed_form is set per family.
Modulus modulus(const MetricProfile& profile);

/// max over grid pairs with 0 < |u - v| <= r_max of |X(u) - X(v)| / omega(|u - v|).
/// Throws DegenerateModulus if omega vanishes at a tested separation.
double lipschitz_statistic(const sampling::PathSample& path, const Modulus& mod, double r_max);

struct LevelStats {
  int grid_size = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
};

struct RefinementReport {
  kernels::CovarianceModel model;
  std::vector<std::string> modulus_names;
  std::vector<int> levels;
  int replicas = 0;
  std::uint64_t master_seed = 0;
  double r_max = 0.0;
  // stats[m][l]: statistic distribution for modulus m at level l
  std::vector<std::vector<LevelStats>> stats;

  /// median at the finest level / median at the coarsest, per modulus
  double median_ratio(std::size_t modulus_index) const;
};

/// Distribution of the Lipschitz statistic across exact-sampler replicas, per
/// modulus and grid size. Under the correct modulus the medians stay flat as
/// the grid refines; under a strictly weaker one they grow.
RefinementReport refinement_study(const kernels::CovarianceModel& model,
                                  const std::vector<Modulus>& moduli,
                                  const std::vector<int>& levels, int replicas, RngStream& rng);

void write_report_json(std::ostream& out, const RefinementReport& report);
void write_report_csv(std::ostream& out, const RefinementReport& report);

}  // namespace logfield::regularity
