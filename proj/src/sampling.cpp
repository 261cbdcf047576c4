#include "logfield/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <json.hpp>

#include "logfield/errors.hpp"

namespace logfield::sampling {

namespace {

constexpr double kPi = std::numbers::pi;

void require_sorted_unique(const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("u_grid must be nonempty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("u_grid must be strictly increasing");
  }
}

}  // namespace

void FourierFieldSpec::validate() const {
  if (lambda < 1) throw DomainError("FourierFieldSpec: lambda must be >= 1");
  if (!(box_l > 0.0)) throw DomainError("FourierFieldSpec: box_l must be > 0");
}

std::string method_name(SampleMethod m) {
  switch (m) {
    case SampleMethod::FourierMA: return "fourier-ma";
    case SampleMethod::CholeskyExact: return "cholesky-exact";
    case SampleMethod::BrownianWalk: return "brownian-walk";
    case SampleMethod::CirculantExact: return "circulant-exact";
  }
  return "unknown";
}

FourierCoefficients draw_fourier_coefficients(const FourierFieldSpec& spec, RngStream& rng) {
  spec.validate();
  FourierCoefficients coeffs;
  coeffs.x.resize(spec.lambda);
  coeffs.y.resize(spec.lambda);
  for (int m = 0; m < spec.lambda; ++m) {
    coeffs.x[m] = rng.normal();
    coeffs.y[m] = rng.normal();
  }
  return coeffs;
}

double eval_field(const FourierCoefficients& coeffs, const FourierFieldSpec& spec, double x) {
  spec.validate();
  if (std::abs(x) > spec.box_l) throw DomainError("eval_field: x outside the box");
  double sum = 0.0;
  for (int m = 1; m <= spec.lambda; ++m) {
    const double phase = kPi * m * x / spec.box_l;
    sum += (coeffs.x[m - 1] * std::cos(phase) + coeffs.y[m - 1] * std::sin(phase)) / std::sqrt(m);
  }
  return sum;
}

PathSample moving_average_field(const FourierCoefficients& coeffs, const FourierFieldSpec& spec,
                                double s, const std::vector<double>& u_grid) {
  spec.validate();
  if (!(s > 0.0)) throw DomainError("moving_average_field: s must be > 0");
  require_sorted_unique(u_grid);

  const double box = spec.box_l;
  for (double u : u_grid) {
    if (std::abs(s * (u - 0.5)) > box || std::abs(s * (u + 0.5)) > box) {
      throw DomainError("moving_average_field: window leaves the box at u = " + std::to_string(u));
    }
  }
  if (0.5 * s > box) throw DomainError("moving_average_field: reference window leaves the box");

  // Window average of mode m around center su:
  //   (1/s) int cos(pi m x/L) dx = w_m cos(pi m s u / L),  w_m = (2L/(pi m s)) sin(pi m s / (2L))
  // and the same attenuation for the sine mode. The u = 0 window is the
  // boundary term subtracted from every value.
  const int lambda = spec.lambda;
  std::vector<double> amp_cos(lambda), amp_sin(lambda), freq(lambda);
  double at_zero = 0.0;
  for (int m = 1; m <= lambda; ++m) {
    const double w = 2.0 * box / (kPi * m * s) * std::sin(kPi * m * s / (2.0 * box));
    const double scale = w / std::sqrt(m);
    amp_cos[m - 1] = scale * coeffs.x[m - 1];
    amp_sin[m - 1] = scale * coeffs.y[m - 1];
    freq[m - 1] = kPi * m * s / box;
    at_zero += amp_cos[m - 1];  // cos(0) = 1, sin(0) = 0
  }

  PathSample path;
  path.u_grid = u_grid;
  path.values.resize(u_grid.size());
  path.method = SampleMethod::FourierMA;
  path.model = CovarianceModel::log1d(s);
  path.seed = spec.seed;
  path.lambda = spec.lambda;
  path.box_l = spec.box_l;
  for (std::size_t i = 0; i < u_grid.size(); ++i) {
    const double u = u_grid[i];
    if (u == 0.0) {
      path.values[i] = 0.0;
      continue;
    }
    double sum = 0.0;
    for (int m = 0; m < lambda; ++m) {
      sum += amp_cos[m] * std::cos(freq[m] * u) + amp_sin[m] * std::sin(freq[m] * u);
    }
    path.values[i] = sum - at_zero;
  }
  return path;
}

PathSample cholesky_sample(const CovarianceModel& model, const std::vector<double>& u_grid,
                           RngStream& rng) {
  model.validate();
  require_sorted_unique(u_grid);
  for (double u : u_grid) {
    if (u < 0.0) throw DomainError("cholesky_sample: grid must be nonnegative");
  }

  const std::size_t n = u_grid.size();
  std::vector<double> rho2_at(n);
  for (std::size_t i = 0; i < n; ++i) rho2_at[i] = kernels::rho2(model, u_grid[i]);

  // indices with u > 0; u = 0 is pinned to the exact value 0
  std::vector<int> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (u_grid[i] != 0.0) live.push_back(static_cast<int>(i));
  }

  PathSample path;
  path.u_grid = u_grid;
  path.values.assign(n, 0.0);
  path.method = SampleMethod::CholeskyExact;
  path.model = model;
  path.seed = rng.master_seed();
  if (live.empty()) return path;

  const int m = static_cast<int>(live.size());
  Eigen::MatrixXd cov(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const int i = live[a], j = live[b];
      const double cross = kernels::rho2(model, std::abs(u_grid[i] - u_grid[j]));
      cov(a, b) = cov(b, a) = 0.5 * (rho2_at[i] + rho2_at[j] - cross);
    }
  }

  const double trace = cov.trace();
  Eigen::LLT<Eigen::MatrixXd> llt;
  bool ok = false;
  for (double jitter : {0.0, 1e-14, 1e-12, 1e-10}) {
    Eigen::MatrixXd work = cov;
    if (jitter > 0.0) work.diagonal().array() += jitter * trace;
    llt.compute(work);
    if (llt.info() == Eigen::Success) {
      ok = true;
      break;
    }
  }
  if (!ok) throw NotPsd("cholesky_sample: covariance not PSD within jitter tolerance");

  Eigen::VectorXd z(m);
  for (int a = 0; a < m; ++a) z(a) = rng.normal();
  const Eigen::VectorXd draw = llt.matrixL() * z;
  for (int a = 0; a < m; ++a) path.values[live[a]] = draw(a);
  return path;
}

PathSample brownian_path(const std::vector<double>& u_grid, RngStream& rng) {
  require_sorted_unique(u_grid);
  if (u_grid.front() != 0.0) throw DomainError("brownian_path: grid must start at 0");

  PathSample path;
  path.u_grid = u_grid;
  path.values.resize(u_grid.size());
  path.method = SampleMethod::BrownianWalk;
  path.model = CovarianceModel::brownian_walk();
  path.seed = rng.master_seed();
  path.values[0] = 0.0;
  for (std::size_t i = 1; i < u_grid.size(); ++i) {
    const double du = u_grid[i] - u_grid[i - 1];
    path.values[i] = path.values[i - 1] + std::sqrt(du) * rng.normal();
  }
  return path;
}

PathSample circulant_sample(const CovarianceModel& model, int n, double u_max, RngStream& rng) {
  model.validate();
  if (n < 2 || (n & (n - 1)) != 0) throw DomainError("circulant_sample: n must be a power of two");
  if (!(u_max > 0.0)) throw DomainError("circulant_sample: u_max must be > 0");

  const double du = u_max / n;

  // autocovariance of the increment sequence: second difference of rho^2.
  // A kink in rho^2 (e.g. brownian-ma at r = s) can push a few embedding
  // eigenvalues slightly negative; padding the circulant repairs it, and
  // leftover negatives far below max are clipped.
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  int half = 0;
  for (int pad = 1;; pad *= 2) {
    half = n * pad;
    const int m2 = 2 * half;
    std::vector<double> rho2_at(half + 2);
    for (int j = 0; j <= half + 1; ++j) rho2_at[j] = kernels::rho2(model, j * du);
    std::vector<std::complex<double>> circ(m2);
    const auto cov_lag = [&](int j) {
      return 0.5 * (rho2_at[j + 1] + rho2_at[std::abs(j - 1)] - 2.0 * rho2_at[j]);
    };
    for (int j = 0; j <= half; ++j) circ[j] = cov_lag(j);
    for (int j = half + 1; j < m2; ++j) circ[j] = circ[m2 - j];

    spectrum.assign(m2, {});
    fft.fwd(spectrum, circ);
    double max_eig = 0.0, min_eig = 0.0;
    for (const auto& v : spectrum) {
      max_eig = std::max(max_eig, v.real());
      min_eig = std::min(min_eig, v.real());
    }
    if (min_eig >= -1e-9 * max_eig) break;
    if (pad >= 8) {
      if (min_eig >= -1e-6 * max_eig) break;  // clipping error is negligible
      throw NotPsd("circulant_sample: embedding eigenvalue " + std::to_string(min_eig) +
                   " vs max " + std::to_string(max_eig));
    }
  }

  // Davies-Harte synthesis: conjugate-symmetric spectral noise, inverse FFT
  const int m2 = 2 * half;
  std::vector<std::complex<double>> freq(m2);
  const auto lam = [&](int k) { return std::max(0.0, spectrum[k].real()); };
  freq[0] = std::sqrt(static_cast<double>(m2) * lam(0)) * rng.normal();
  freq[half] = std::sqrt(static_cast<double>(m2) * lam(half)) * rng.normal();
  for (int k = 1; k < half; ++k) {
    const double scale = std::sqrt(static_cast<double>(m2) * lam(k) / 2.0);
    const std::complex<double> xi(rng.normal(), rng.normal());
    freq[k] = scale * xi;
    freq[m2 - k] = std::conj(freq[k]);
  }
  std::vector<std::complex<double>> increments(m2);
  fft.inv(increments, freq);

  PathSample path;
  path.u_grid.resize(n + 1);
  path.values.resize(n + 1);
  path.method = SampleMethod::CirculantExact;
  path.model = model;
  path.seed = rng.master_seed();
  path.u_grid[0] = 0.0;
  path.values[0] = 0.0;
  for (int j = 0; j < n; ++j) {
    path.u_grid[j + 1] = (j + 1 == n) ? u_max : (j + 1) * du;
    path.values[j + 1] = path.values[j] + increments[j].real();
  }
  return path;
}

void write_path_csv(std::ostream& out, const PathSample& path) {
  nlohmann::json meta;
  meta["seed"] = path.seed;
  meta["model"] = kernels::family_name(path.model.family);
  meta["method"] = method_name(path.method);
  meta["s"] = path.model.width_s;
  meta["alpha"] = path.model.alpha;
  if (path.method == SampleMethod::FourierMA) {
    meta["lambda"] = path.lambda;
    meta["box_l"] = path.box_l;
  }
  out << "# " << meta.dump() << "\n";
  out << "u,value\n";
  char buf[80];
  for (std::size_t i = 0; i < path.u_grid.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", path.u_grid[i], path.values[i]);
    out << buf;
  }
}

}  // namespace logfield::sampling
