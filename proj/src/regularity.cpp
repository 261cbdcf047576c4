#include "logfield/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

#include <json.hpp>

#include "logfield/errors.hpp"
#include "logfield/quadrature.hpp"

namespace logfield::regularity {

namespace {

using kernels::Family;
using kernels::SmallRAsymptote;

// below this eps, skip bisection and use the family asymptote for rho^{-1}
constexpr double kAsymptoteCrossoverEps = 1e-100;

// log of rho^{-1}(eps) from the family's small-r closed form, valid for eps
// far below the representable range of the half-width itself
double asymptotic_log_half_width(const MetricProfile& profile, double eps) {
  const double log_eps = std::log(eps);
  switch (profile.small_r_asymptote()) {
    case SmallRAsymptote::SqrtR:
      return 2.0 * log_eps;
    case SmallRAsymptote::Linear: {
      const double r0 = 1e-8;
      return log_eps - std::log(profile.rho(r0) / r0);
    }
    case SmallRAsymptote::RSqrtLog: {
      // rho(r) ~= r sqrt(3 - log r^2)
      double log_r = log_eps;
      for (int it = 0; it < 6; ++it) log_r = log_eps - 0.5 * std::log(3.0 - 2.0 * log_r);
      return log_r;
    }
    case SmallRAsymptote::SqrtRLog: {
      // rho^2(r) ~= c r log(1/r)
      const double r0 = 1e-8;
      const double c = profile.rho2(r0) / (r0 * std::log(1.0 / r0));
      double log_r = 2.0 * log_eps;
      for (int it = 0; it < 6; ++it) log_r = 2.0 * log_eps - std::log(c * (-log_r));
      return log_r;
    }
    case SmallRAsymptote::PowerHalfAlphaPlusOne: {
      const double expo = 0.5 * profile.model().alpha + 1.0;
      const double r0 = 1e-8;
      const double log_c = std::log(profile.rho(r0)) - expo * std::log(r0);
      return (log_eps - log_c) / expo;
    }
  }
  throw DomainError("asymptotic_log_half_width: unknown asymptote");
}

// log rho^{-1}(eps); >= 0 means a single ball covers the domain
double log_half_width(const MetricProfile& profile, double eps) {
  if (!(eps > 0.0)) throw DomainError("rho_inverse: eps must be > 0");
  if (profile.model().family == Family::BrownianWalk) {
    // rho = sqrt(r) exactly
    return std::min(0.0, 2.0 * std::log(eps));
  }
  if (!(eps < profile.rho(1.0))) return 0.0;
  if (eps < kAsymptoteCrossoverEps) return asymptotic_log_half_width(profile, eps);

  double lo = std::min(0.5, eps);
  while (profile.rho(lo) > eps) {
    lo *= 1e-3;
    if (lo < 1e-280) throw DomainError("rho_inverse: eps below the resolvable rho range");
  }
  // bisection in log r: relative precision independent of the scale of eps
  double log_lo = std::log(lo), log_hi = 0.0;
  for (int it = 0; it < 200 && (log_hi - log_lo) > 1e-15; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    (profile.rho(std::exp(mid)) > eps ? log_hi : log_lo) = mid;
  }
  return 0.5 * (log_lo + log_hi);
}

}  // namespace

double rho_inverse(const MetricProfile& profile, double eps) {
  return std::exp(std::min(0.0, log_half_width(profile, eps)));
}

long long covering_number(const MetricProfile& profile, double eps) {
  if (!(eps > 0.0)) throw DomainError("covering_number: eps must be > 0");
  const double h = rho_inverse(profile, eps);
  if (h >= 1.0) return 1;
  // snap guard keeps 1/(2h) stable where it lands exactly on an integer
  const double m = 1.0 / (2.0 * h);
  return 1 + static_cast<long long>(std::floor(m + 1e-9));
}

CoveringProfile covering_profile(const MetricProfile& profile, double eps_min,
                                 int points_per_decade) {
  if (points_per_decade < 2) throw DomainError("covering_profile: points_per_decade too small");
  CoveringProfile cov;
  cov.diameter = profile.rho(1.0);
  if (!(eps_min > 0.0) || !(eps_min < cov.diameter)) {
    throw DomainError("covering_profile: need 0 < eps_min < diameter");
  }
  const double eps_max = 0.999 * cov.diameter;
  const int count =
      std::max(2, static_cast<int>(std::ceil(std::log10(eps_max / eps_min) * points_per_decade)) + 1);
  for (int i = 0; i < count; ++i) {
    const double eps =
        eps_max * std::pow(eps_min / eps_max, static_cast<double>(i) / (count - 1));
    cov.eps_grid.push_back(eps);
    cov.counts.push_back(covering_number(profile, eps));
  }
  // continuous surrogate: replaces Floor(1/(2h)) by 1/(2h); the difference
  // integrates to nothing at the Dudley integral's tolerance
  auto shared = std::make_shared<MetricProfile>(profile);
  cov.log_count = [shared](double eps) {
    const double lh = log_half_width(*shared, eps);
    if (lh >= 0.0) return 0.0;
    if (lh < -30.0) return -(std::log(2.0) + lh);  // log1p(1/(2h)) without overflow
    return std::log1p(0.5 * std::exp(-lh));
  };
  return cov;
}

double dudley_integral(const CoveringProfile& covering, double delta) {
  if (delta == 0.0) return 0.0;
  if (!(delta > 0.0) || !(delta < covering.diameter)) {
    throw DomainError("dudley_integral: need 0 <= delta < diameter");
  }
  if (!covering.log_count) throw NonConvergence("dudley_integral: no covering evaluator");
  const auto& log_n = covering.log_count;
  quad::QuadratureSpec spec;
  spec.abs_tol = 1e-300;  // value scales with delta; rel_tol governs
  spec.rel_tol = 1e-7;    // panel estimates are conservative; 1e-9 can stall
  spec.max_subdivisions = 60000;
  return quad::integrate_1d([&](double eps) { return std::sqrt(std::max(0.0, log_n(eps))); }, 0.0,
                            delta, spec);
}

std::string modulus_form_name(ModulusForm f) {
  switch (f) {
    case ModulusForm::RLogInv: return "r-log-inv";
    case ModulusForm::SqrtRLogInv: return "sqrt-r-log-inv";
    case ModulusForm::PowerLog: return "power-log";
    case ModulusForm::PlainR: return "r";
    case ModulusForm::SqrtR: return "sqrt-r";
  }
  return "unknown";
}

Modulus Modulus::analytic_form(ModulusForm form, double power_alpha) {
  Modulus m;
  m.closed_form = form;
  m.power_alpha = power_alpha;
  m.analytic = true;
  return m;
}

double Modulus::eval(double r) const {
  if (!(r > 0.0)) throw DomainError("Modulus::eval: r must be > 0");
  if (analytic) {
    switch (closed_form) {
      case ModulusForm::RLogInv: return r * std::log(1.0 / r);
      case ModulusForm::SqrtRLogInv: return std::sqrt(r * std::log(1.0 / r));
      case ModulusForm::PowerLog: return std::pow(r, 0.5 * power_alpha + 1.0) * std::log(1.0 / r);
      case ModulusForm::PlainR: return r;
      case ModulusForm::SqrtR: return std::sqrt(r);
    }
    throw DomainError("Modulus::eval: unknown form");
  }
  if (r_grid.empty()) throw DomainError("Modulus::eval: empty table");
  if (r <= r_grid.front()) {
    // extrapolate with the local power law of the first two points
    if (r_grid.size() < 2) return omega_values.front();
    const double p = std::log(omega_values[1] / omega_values[0]) / std::log(r_grid[1] / r_grid[0]);
    return omega_values.front() * std::pow(r / r_grid.front(), p);
  }
  if (r >= r_grid.back()) return omega_values.back();
  const auto it = std::upper_bound(r_grid.begin(), r_grid.end(), r);
  const std::size_t hi = it - r_grid.begin();
  const double t = std::log(r / r_grid[hi - 1]) / std::log(r_grid[hi] / r_grid[hi - 1]);
  return std::exp((1.0 - t) * std::log(omega_values[hi - 1]) + t * std::log(omega_values[hi]));
}

Modulus modulus(const MetricProfile& profile) {
  Modulus result;
  result.r_grid = profile.r_grid();
  const double rho_max = profile.rho(result.r_grid.back());
  const double diameter = profile.rho(1.0);
  if (!(rho_max < diameter)) {
    throw DomainError("modulus: profile grid must stay inside rho(r) < rho(1)");
  }
  const CoveringProfile covering =
      covering_profile(profile, std::min(0.5 * profile.rho(result.r_grid.front()), 1e-3 * diameter));
  result.omega_values.reserve(result.r_grid.size());
  for (double r : result.r_grid) {
    result.omega_values.push_back(dudley_integral(covering, profile.rho(r)));
  }
  switch (profile.model().family) {
    case Family::Log1D:
    case Family::BrownianMA:
    case Family::Log3D:
      result.closed_form = ModulusForm::RLogInv;
      break;
    case Family::BrownianWalk:
      result.closed_form = ModulusForm::SqrtRLogInv;
      break;
    case Family::PowerLaw:
      if (profile.model().alpha < 0.0) {
        result.closed_form = ModulusForm::PowerLog;
        result.power_alpha = profile.model().alpha;
      } else {
        result.closed_form = ModulusForm::RLogInv;
      }
      break;
  }
  return result;
}

double lipschitz_statistic(const sampling::PathSample& path, const Modulus& mod, double r_max) {
  const auto& u = path.u_grid;
  const auto& x = path.values;
  if (u.size() < 2) throw DomainError("lipschitz_statistic: need at least two grid points");
  if (!(r_max > 0.0)) throw DomainError("lipschitz_statistic: r_max must be > 0");

  // uniform grids get a per-separation omega table
  const std::size_t n = u.size();
  const double du = u[1] - u[0];
  bool uniform = true;
  for (std::size_t i = 2; i < n && uniform; ++i) {
    uniform = std::abs((u[i] - u[i - 1]) - du) <= 1e-12 * du;
  }

  double best = 0.0;
  if (uniform) {
    const auto d_max = static_cast<std::size_t>(std::min<double>(
        static_cast<double>(n - 1), std::floor(r_max / du * (1.0 + 1e-12))));
    std::vector<double> inv_omega(d_max + 1, 0.0);
    for (std::size_t d = 1; d <= d_max; ++d) {
      const double w = mod.eval(d * du);
      if (!(w > 0.0)) throw DegenerateModulus("omega vanishes at r = " + std::to_string(d * du));
      inv_omega[d] = 1.0 / w;
    }
    for (std::size_t d = 1; d <= d_max; ++d) {
      const double iw = inv_omega[d];
      for (std::size_t i = 0; i + d < n; ++i) {
        best = std::max(best, std::abs(x[i + d] - x[i]) * iw);
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n && u[j] - u[i] <= r_max; ++j) {
        const double w = mod.eval(u[j] - u[i]);
        if (!(w > 0.0)) throw DegenerateModulus("omega vanishes at r = " + std::to_string(u[j] - u[i]));
        best = std::max(best, std::abs(x[j] - x[i]) / w);
      }
    }
  }
  return best;
}

namespace {

LevelStats summarize(int grid_size, std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double q) {
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double t = pos - lo;
    return (1.0 - t) * values[lo] + t * values[hi];
  };
  return LevelStats{grid_size, quantile(0.5), quantile(0.25), quantile(0.75)};
}

}  // namespace

double RefinementReport::median_ratio(std::size_t modulus_index) const {
  const auto& row = stats.at(modulus_index);
  return row.back().median / row.front().median;
}

RefinementReport refinement_study(const kernels::CovarianceModel& model,
                                  const std::vector<Modulus>& moduli,
                                  const std::vector<int>& levels, int replicas, RngStream& rng) {
  if (moduli.empty()) throw DomainError("refinement_study: no moduli");
  if (replicas < 1) throw DomainError("refinement_study: replicas must be >= 1");
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] <= levels[i - 1]) throw DomainError("refinement_study: levels must increase");
  }

  constexpr double kRMaxFraction = 0.25;  // moduli are local statements
  RefinementReport report;
  report.model = model;
  report.levels = levels;
  report.replicas = replicas;
  report.master_seed = rng.master_seed();
  report.r_max = kRMaxFraction;
  for (const auto& m : moduli) report.modulus_names.push_back(modulus_form_name(m.closed_form));
  report.stats.assign(moduli.size(), {});

  std::uint64_t stream_index = 0;
  for (int n : levels) {
    std::vector<std::vector<double>> values(moduli.size());
    for (int rep = 0; rep < replicas; ++rep) {
      RngStream replica_rng = rng.substream(stream_index++);
      sampling::PathSample path;
      if (model.family == Family::BrownianWalk) {
        std::vector<double> grid(n + 1);
        for (int j = 0; j <= n; ++j) grid[j] = static_cast<double>(j) / n;
        path = sampling::brownian_path(grid, replica_rng);
      } else {
        path = sampling::circulant_sample(model, n, 1.0, replica_rng);
      }
      for (std::size_t m = 0; m < moduli.size(); ++m) {
        values[m].push_back(lipschitz_statistic(path, moduli[m], kRMaxFraction));
      }
    }
    for (std::size_t m = 0; m < moduli.size(); ++m) {
      report.stats[m].push_back(summarize(n, std::move(values[m])));
    }
  }
  return report;
}

void write_report_json(std::ostream& out, const RefinementReport& report) {
  nlohmann::json j;
  j["model"]["family"] = kernels::family_name(report.model.family);
  j["model"]["alpha"] = report.model.alpha;
  j["model"]["width_s"] = report.model.width_s;
  j["levels"] = report.levels;
  j["replicas"] = report.replicas;
  j["master_seed"] = report.master_seed;
  j["r_max"] = report.r_max;
  for (std::size_t m = 0; m < report.modulus_names.size(); ++m) {
    nlohmann::json entry;
    entry["modulus"] = report.modulus_names[m];
    for (const auto& s : report.stats[m]) {
      entry["levels"].push_back({{"grid_size", s.grid_size},
                                 {"median", s.median},
                                 {"q1", s.q1},
                                 {"q3", s.q3}});
    }
    entry["median_ratio"] = report.median_ratio(m);
    j["moduli"].push_back(entry);
  }
  out << j.dump(2) << "\n";
}

void write_report_csv(std::ostream& out, const RefinementReport& report) {
  out << "modulus,grid_size,median,q1,q3\n";
  char buf[160];
  for (std::size_t m = 0; m < report.modulus_names.size(); ++m) {
    for (const auto& s : report.stats[m]) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g\n", report.modulus_names[m].c_str(),
                    s.grid_size, s.median, s.q1, s.q3);
      out << buf;
    }
  }
}

}  // namespace logfield::regularity
