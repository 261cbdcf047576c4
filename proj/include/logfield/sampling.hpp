#pragma once

#include "logfield/errors.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "logfield/kernels.hpp"
#include "logfield/rng.hpp"

namespace logfield::sampling {

using kernels::CovarianceModel;

/// Spectral truncation of the log-correlated field on the box (-L, L):
/// phi_Lambda(x) = sum_{m=1}^{Lambda} m^{-1/2} [X_m cos(pi m x/L) + Y_m sin(pi m x/L)]
/// with X_m, Y_m independent standard normals.
struct FourierFieldSpec {
  int lambda = 4000;
  double box_l = 5.0;
  std::uint64_t seed = 0;

  void validate() const;  // throws DomainError
};

struct FourierCoefficients {
  std::vector<double> x;  // cosine amplitudes
  std::vector<double> y;  // sine amplitudes
};

enum class SampleMethod { FourierMA, CholeskyExact, BrownianWalk, CirculantExact };

std::string method_name(SampleMethod m);

/// One realization on a grid plus the metadata needed to regenerate it.
struct PathSample {
  std::vector<double> u_grid;
  std::vector<double> values;
  SampleMethod method = SampleMethod::CholeskyExact;
  CovarianceModel model;
  std::uint64_t seed = 0;
  int lambda = 0;      // FourierMA only
  double box_l = 0.0;  // FourierMA only
};

/// 2 Lambda independent standard normal draws, reproducible from the stream.
FourierCoefficients draw_fourier_coefficients(const FourierFieldSpec& spec, RngStream& rng);

/// Partial sum phi_Lambda(x); DomainError outside the box.
double eval_field(const FourierCoefficients& coeffs, const FourierFieldSpec& spec, double x);

/// Moving average phi_bar_s(u) over windows [s(u-1/2), s(u+1/2)], computed
/// with the exact antiderivative of each mode (no per-mode quadrature).
/// phi_bar_s(0) = 0 identically; DomainError if any window leaves the box.
PathSample moving_average_field(const FourierCoefficients& coeffs, const FourierFieldSpec& spec,
                                double s, const std::vector<double>& u_grid);

/// Exact Gaussian draw with Cov(u,v) = [rho2(u) + rho2(v) - rho2(|u-v|)] / 2,
/// the process pinned to 0 at u = 0. Grid must be strictly increasing and
/// nonnegative. Throws NotPsd if the covariance cannot be factored after
/// diagonal jitter up to 1e-10 * trace.
PathSample cholesky_sample(const CovarianceModel& model, const std::vector<double>& u_grid,
                           RngStream& rng);

/// Cumulative sum of independent N(0, du) increments, B(0) = 0. Grid must be
/// sorted and start at 0.
PathSample brownian_path(const std::vector<double>& u_grid, RngStream& rng);

/// Exact stationary-increment draw on the uniform grid {0, du, ..., n du},
/// du = u_max / n, via circulant embedding of the increment covariance
/// (Davies-Harte). n must be a power of two. Same law as cholesky_sample on
/// that grid at O(n log n) cost, which is what the refinement study needs at
/// fine levels.
PathSample circulant_sample(const CovarianceModel& model, int n, double u_max, RngStream& rng);

/// CSV with a '#'-prefixed JSON metadata line, columns u, value.
void write_path_csv(std::ostream& out, const PathSample& path);

}  // namespace logfield::sampling
