#include "logfield/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "logfield/errors.hpp"

namespace logfield::kernels {

namespace {

// sin k - k cos k, with a series branch to avoid cancellation near 0
double spherical_bracket(double k) {
  const double a = std::abs(k);
  if (a < 0.05) {
    const double k2 = k * k;
    return k * k2 / 3.0 * (1.0 - k2 / 10.0 * (1.0 - k2 / 28.0 * (1.0 - k2 / 54.0)));
  }
  return std::sin(k) - k * std::cos(k);
}

// (1 - sin(x)/x) / x^2; tends to 1/6 as x -> 0
double one_minus_sinc_over_x2(double x) {
  const double a = std::abs(x);
  if (a < 0.05) {
    const double x2 = x * x;
    return (1.0 / 6.0) * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)));
  }
  return (1.0 - std::sin(x) / x) / (x * x);
}

// Second antiderivative of |t|^alpha: K2'' = |t|^alpha. The alpha = -1 branch
// is the finite-part antiderivative |t| log|t|.
double k2_power(double t, double alpha) {
  if (t == 0.0) return 0.0;
  const double a = std::abs(t);
  if (alpha == -1.0) return a * std::log(a);
  return std::pow(a, alpha + 2.0) / ((alpha + 1.0) * (alpha + 2.0));
}

constexpr double kPi = std::numbers::pi;
constexpr double kLog3dVariancePrefactor = 64.0 * kPi * kPi * kPi * kPi;  // 2^6 pi^4

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Log1D: return "log1d";
    case Family::BrownianMA: return "brownian-ma";
    case Family::PowerLaw: return "power-law";
    case Family::Log3D: return "log3d";
    case Family::BrownianWalk: return "brownian-walk";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "log1d") return Family::Log1D;
  if (name == "brownian-ma") return Family::BrownianMA;
  if (name == "power-law") return Family::PowerLaw;
  if (name == "log3d") return Family::Log3D;
  if (name == "brownian-walk") return Family::BrownianWalk;
  throw DomainError("unknown model family: " + name);
}

void CovarianceModel::validate() const {
  if (!(width_s > 0.0)) throw DomainError("CovarianceModel: width_s must be > 0");
  if (family == Family::PowerLaw) {
    if (!(alpha > -2.0) || alpha == 0.0) {
      throw DomainError("CovarianceModel: PowerLaw needs alpha in (-2,0) or (0,inf)");
    }
  }
}

std::string asymptote_name(SmallRAsymptote a) {
  switch (a) {
    case SmallRAsymptote::RSqrtLog: return "r-sqrt-log";
    case SmallRAsymptote::Linear: return "linear";
    case SmallRAsymptote::PowerHalfAlphaPlusOne: return "power-half-alpha-plus-one";
    case SmallRAsymptote::SqrtRLog: return "sqrt-r-log";
    case SmallRAsymptote::SqrtR: return "sqrt-r";
  }
  return "unknown";
}

double L(double r) {
  if (r == 0.0) return 0.0;
  return r * r * std::log(std::abs(r));
}

double F_log(double a, double b, double c, double d) {
  if (!(a < b) || !(c < d)) throw DomainError("F_log: requires a < b and c < d");
  return 1.5 * (a - b) * (c - d) + 0.5 * (L(c - a) - L(d - a) - L(c - b) + L(d - b));
}

double scale_anomaly_check(double a, double b, double c, double d, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("scale_anomaly_check: lambda must be > 0");
  const double scaled = F_log(lambda * a, lambda * b, lambda * c, lambda * d);
  const double l2 = lambda * lambda;
  return scaled - l2 * F_log(a, b, c, d) + l2 * (b - a) * (d - c) * std::log(lambda);
}

double rho2_log1d(double r) {
  if (r < 0.0) r = -r;
  if (r == 0.0) return 0.0;
  if (r < 0.5) {
    // L(1+r) + L(1-r) = (1+r^2) log(1-r^2) + 4 r atanh(r), stable as r -> 0
    const double r2 = r * r;
    return (1.0 + r2) * std::log1p(-r2) + 4.0 * r * std::atanh(r) - 2.0 * r2 * std::log(r);
  }
  return L(r + 1.0) + L(r - 1.0) - 2.0 * L(r);
}

double rho2_brownian_ma(double r, double s) {
  if (!(s > 0.0)) throw DomainError("rho2_brownian_ma: s must be > 0");
  if (r < 0.0) r = -r;
  if (r >= s) return 2.0 * r - 2.0 * s / 3.0;
  return 2.0 * r * r / s - 2.0 * r * r * r / (3.0 * s * s);
}

double rho2_powerlaw(double r, double alpha, double s) {
  CovarianceModel::power_law(alpha, s).validate();
  if (r < 0.0) r = -r;
  if (r == 0.0) return 0.0;
  // Sign chosen so the kernel tau * |t|^alpha is (conditionally) positive
  // definite on zero-mean test functions; it flips on (-1, 0).
  const double tau = (alpha > 0.0 || alpha <= -1.0) ? 1.0 : -1.0;
  if (r < 0.01 * s) {
    // the direct second difference of K2 at s cancels catastrophically for
    // tiny r; expand it instead: K2''(s) r^2 + K2''''(s) r^4 / 12
    const double d2 =
        (alpha == -1.0)
            ? r * r / s + r * r * r * r / (6.0 * s * s * s)
            : std::pow(s, alpha) * r * r +
                  alpha * (alpha - 1.0) * std::pow(s, alpha - 2.0) * r * r * r * r / 12.0;
    return tau * 2.0 / (s * s) * (d2 - 2.0 * k2_power(r, alpha));
  }
  const auto window_pair = [&](double d) {
    return k2_power(d + s, alpha) + k2_power(d - s, alpha) - 2.0 * k2_power(d, alpha);
  };
  return tau * 2.0 / (s * s) * (window_pair(r) - window_pair(0.0));
}

double G_3d(double r) {
  if (r < 0.0) throw DomainError("G_3d: r must be >= 0");
  if (r == 0.0) return 0.0;
  // scaled integrand sb(k)^2 / k^5 * (1 - sinc(kr))/(kr)^2 keeps values O(1)
  // for all r; G(r) = r^2 * integral
  const auto integrand = [r](double k) {
    const double sb = spherical_bracket(k);
    return sb * sb / std::pow(k, 5) * one_minus_sinc_over_x2(k * r);
  };
  quad::QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  spec.rel_tol = 1e-9;
  spec.max_subdivisions = 400000;
  return r * r * quad::integrate_semi_infinite(integrand, spec, 3.0);
}

double g3d_small_r_constant() {
  static const double c3 = [] {
    quad::QuadratureSpec spec;
    spec.abs_tol = 1e-12;
    spec.rel_tol = 1e-10;
    spec.max_subdivisions = 200000;
    return quad::integrate_semi_infinite(
        [](double k) {
          const double sb = spherical_bracket(k);
          return sb * sb / (6.0 * std::pow(k, 5));
        },
        spec, 3.0);
  }();
  return c3;
}

double rho2(const CovarianceModel& model, double r) {
  model.validate();
  switch (model.family) {
    case Family::Log1D: return rho2_log1d(r);
    case Family::BrownianMA: return rho2_brownian_ma(r, model.width_s);
    case Family::PowerLaw: return rho2_powerlaw(r, model.alpha, model.width_s);
    case Family::Log3D: return kLog3dVariancePrefactor * G_3d(std::abs(r));
    case Family::BrownianWalk: return std::abs(r);
  }
  throw DomainError("rho2: unknown family");
}

namespace {

SmallRAsymptote classify_asymptote(const CovarianceModel& model) {
  switch (model.family) {
    case Family::Log1D: return SmallRAsymptote::RSqrtLog;
    case Family::BrownianMA: return SmallRAsymptote::Linear;
    case Family::Log3D: return SmallRAsymptote::Linear;
    case Family::BrownianWalk: return SmallRAsymptote::SqrtR;
    case Family::PowerLaw:
      if (model.alpha > 0.0) return SmallRAsymptote::Linear;
      if (model.alpha == -1.0) return SmallRAsymptote::SqrtRLog;
      return SmallRAsymptote::PowerHalfAlphaPlusOne;
  }
  throw DomainError("classify_asymptote: unknown family");
}

}  // namespace

MetricProfile::MetricProfile(CovarianceModel model, std::vector<double> r_grid)
    : model_(model), r_grid_(std::move(r_grid)), asymptote_(classify_asymptote(model)) {
  model_.validate();
  if (r_grid_.empty()) throw DomainError("MetricProfile: empty r grid");
  for (std::size_t i = 0; i < r_grid_.size(); ++i) {
    if (!(r_grid_[i] > 0.0)) throw DomainError("MetricProfile: grid values must be positive");
    if (i > 0 && !(r_grid_[i] > r_grid_[i - 1])) {
      throw DomainError("MetricProfile: grid must be strictly increasing");
    }
  }
  if (model_.family == Family::PowerLaw && model_.alpha >= 2.0) {
    // rho grows superlinearly for alpha >= 2: not a variogram, subadditivity
    // cannot hold
    throw DomainError("MetricProfile: PowerLaw needs alpha < 2 for a valid metric");
  }

  if (model_.family == Family::Log3D) {
    // dense log-spaced G(r) table covering the grid and the unit domain;
    // below the table G(r) = C3 r^2 to high accuracy
    const double lo = std::min(1e-3, 0.5 * r_grid_.front());
    const double hi = 1.25 * std::max(1.0, r_grid_.back());
    const int per_decade = 32;
    const int count = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
    g3d_log_r_.resize(count);
    g3d_values_.resize(count);
    for (int i = 0; i < count; ++i) {
      const double lr = std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1);
      g3d_log_r_[i] = lr;
      g3d_values_[i] = G_3d(std::exp(lr));
    }
  }

  rho_values_.reserve(r_grid_.size());
  for (double r : r_grid_) {
    const double v = rho2(r);
    if (!(v >= 0.0)) throw DomainError("MetricProfile: negative rho^2 at r = " + std::to_string(r));
    rho_values_.push_back(std::sqrt(v));
  }

  // metric sanity on the tabulated grid; Log3D goes through the interpolated
  // G table, so its tolerance is interpolation-grade rather than closed-form
  const double scale = rho_values_.back();
  const double tol = (model_.family == Family::Log3D ? 1e-4 : 1e-9) * (1.0 + scale);
  const double small_r_limit =
      (model_.family == Family::PowerLaw) ? 0.5 * model_.width_s : r_grid_.back();
  for (std::size_t i = 1; i < r_grid_.size(); ++i) {
    if (r_grid_[i] <= small_r_limit && rho_values_[i] + tol < rho_values_[i - 1]) {
      throw DomainError("MetricProfile: rho not nondecreasing at r = " + std::to_string(r_grid_[i]));
    }
  }
  for (std::size_t i = 0; i < r_grid_.size(); ++i) {
    for (std::size_t j = i; j < r_grid_.size(); ++j) {
      const double sum = r_grid_[i] + r_grid_[j];
      if (sum > r_grid_.back()) break;
      if (rho(sum) > rho_values_[i] + rho_values_[j] + tol) {
        throw DomainError("MetricProfile: subadditivity violated at r1 = " +
                          std::to_string(r_grid_[i]) + ", r2 = " + std::to_string(r_grid_[j]));
      }
    }
  }
}

double MetricProfile::rho2(double r) const {
  r = std::abs(r);
  if (r == 0.0) return 0.0;
  if (model_.family != Family::Log3D) return kernels::rho2(model_, r);
  const double lr = std::log(r);
  if (lr <= g3d_log_r_.front()) {
    return kLog3dVariancePrefactor * g3d_small_r_constant() * r * r;
  }
  if (lr >= g3d_log_r_.back()) {
    return kLog3dVariancePrefactor * G_3d(r);  // off the table, rare
  }
  const auto it = std::upper_bound(g3d_log_r_.begin(), g3d_log_r_.end(), lr);
  const std::size_t hi = it - g3d_log_r_.begin();
  const double t = (lr - g3d_log_r_[hi - 1]) / (g3d_log_r_[hi] - g3d_log_r_[hi - 1]);
  const double g = std::exp((1.0 - t) * std::log(g3d_values_[hi - 1]) + t * std::log(g3d_values_[hi]));
  return kLog3dVariancePrefactor * g;
}

double MetricProfile::rho(double r) const { return std::sqrt(rho2(r)); }

MetricProfile metric_profile(const CovarianceModel& model, std::vector<double> r_grid) {
  return MetricProfile(model, std::move(r_grid));
}

void write_profile_csv(std::ostream& out, const MetricProfile& profile) {
  nlohmann::json meta;
  meta["family"] = family_name(profile.model().family);
  meta["alpha"] = profile.model().alpha;
  meta["width_s"] = profile.model().width_s;
  meta["small_r_asymptote"] = asymptote_name(profile.small_r_asymptote());
  out << "# " << meta.dump() << "\n";
  out << "r,rho,rho2\n";
  char buf[96];
  for (std::size_t i = 0; i < profile.r_grid().size(); ++i) {
    const double r = profile.r_grid()[i];
    const double rho = profile.rho_values()[i];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r, rho, rho * rho);
    out << buf;
  }
}

}  // namespace logfield::kernels
