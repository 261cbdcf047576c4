#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <vector>

#include "logfield/errors.hpp"
#include "logfield/kernels.hpp"
#include "logfield/rng.hpp"
#include "logfield/sampling.hpp"

using namespace logfield;
using kernels::CovarianceModel;
using sampling::FourierFieldSpec;

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / (v.size() - 1);
}

}  // namespace

TEST_CASE("rng: streams are deterministic and distinct") {
  RngStream a(123, 0), b(123, 0), c(123, 1);
  CHECK(a.normal() == b.normal());
  CHECK(a.next_u64() == b.next_u64());
  RngStream d(123, 0);
  CHECK(d.next_u64() != c.next_u64());
  RngStream s1 = d.substream(5), s2 = d.substream(6);
  CHECK(s1.next_u64() != s2.next_u64());
}

TEST_CASE("draw_fourier_coefficients: size, determinism, CLT mean bound") {
  FourierFieldSpec tiny;
  tiny.lambda = 1;
  RngStream rng(5);
  const auto pair = sampling::draw_fourier_coefficients(tiny, rng);
  CHECK(pair.x.size() == 1);
  CHECK(pair.y.size() == 1);

  FourierFieldSpec spec;
  spec.lambda = 4000;
  spec.seed = 17;
  RngStream r1(17), r2(17);
  const auto c1 = sampling::draw_fourier_coefficients(spec, r1);
  const auto c2 = sampling::draw_fourier_coefficients(spec, r2);
  CHECK(c1.x == c2.x);
  CHECK(c1.y == c2.y);

  double total = std::accumulate(c1.x.begin(), c1.x.end(), 0.0) +
                 std::accumulate(c1.y.begin(), c1.y.end(), 0.0);
  CHECK(std::abs(total / 8000.0) <= 4.0 / std::sqrt(8000.0));
}

TEST_CASE("eval_field: single modes and domain check") {
  FourierFieldSpec spec;
  spec.lambda = 3;
  spec.box_l = 5.0;
  sampling::FourierCoefficients coeffs;
  coeffs.x = {0.0, 0.0, 0.0};
  coeffs.y = {0.0, 0.0, 0.0};
  CHECK(sampling::eval_field(coeffs, spec, 1.3) == 0.0);

  coeffs.x[0] = 1.0;
  const double x = 0.7;
  CHECK(sampling::eval_field(coeffs, spec, x) ==
        doctest::Approx(std::cos(std::numbers::pi * x / 5.0)).epsilon(1e-14));
  CHECK_THROWS_AS(sampling::eval_field(coeffs, spec, 5.1), DomainError);
}

TEST_CASE("eval_field: variance over seeds equals the harmonic number") {
  FourierFieldSpec spec;
  spec.lambda = 64;
  spec.box_l = 5.0;
  double h_lambda = 0.0;
  for (int m = 1; m <= spec.lambda; ++m) h_lambda += 1.0 / m;

  RngStream rng(1001);
  std::vector<double> values;
  const int seeds = 4000;
  for (int i = 0; i < seeds; ++i) {
    RngStream stream = rng.substream(i);
    const auto coeffs = sampling::draw_fourier_coefficients(spec, stream);
    values.push_back(sampling::eval_field(coeffs, spec, 1.234));
  }
  const double var = variance(values);
  const double se = var * std::sqrt(2.0 / (seeds - 1));
  CHECK(std::abs(var - h_lambda) <= 3.0 * se);
}

TEST_CASE("moving_average_field: boundary condition and domain checks") {
  FourierFieldSpec spec;
  spec.lambda = 50;
  spec.box_l = 5.0;
  RngStream rng(3);
  const auto coeffs = sampling::draw_fourier_coefficients(spec, rng);
  const std::vector<double> grid{-1.0, 0.0, 0.5, 1.0};
  const auto path = sampling::moving_average_field(coeffs, spec, 0.2, grid);
  CHECK(path.values[1] == 0.0);
  CHECK(path.values[2] != 0.0);

  CHECK_THROWS_AS(sampling::moving_average_field(coeffs, spec, 0.2, std::vector<double>{30.0}),
                  DomainError);
}

TEST_CASE("moving_average_field: windowed average equals quadrature of eval_field") {
  FourierFieldSpec spec;
  spec.lambda = 40;
  spec.box_l = 5.0;
  RngStream rng(8);
  const auto coeffs = sampling::draw_fourier_coefficients(spec, rng);
  const double s = 0.3, u = 1.7;
  const auto path = sampling::moving_average_field(coeffs, spec, s, {u});

  // midpoint-rule oracle for (1/s) int over the two windows
  const auto window_avg = [&](double center) {
    const int n = 20000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = -0.5 + (i + 0.5) / n;
      acc += sampling::eval_field(coeffs, spec, s * (center - w));
    }
    return acc / n;
  };
  CHECK(path.values[0] == doctest::Approx(window_avg(u) - window_avg(0.0)).epsilon(1e-6));
}

TEST_CASE("moving_average_field: MC variance matches rho2_log1d within 3 standard errors") {
  FourierFieldSpec spec;
  spec.lambda = 4000;
  spec.box_l = 5.0;
  const double s = 0.2;
  const int seeds = 2000;
  RngStream rng(2024);
  std::vector<double> at_one;
  at_one.reserve(seeds);
  for (int i = 0; i < seeds; ++i) {
    RngStream stream = rng.substream(i);
    const auto coeffs = sampling::draw_fourier_coefficients(spec, stream);
    const auto path = sampling::moving_average_field(coeffs, spec, s, {1.0});
    at_one.push_back(path.values[0]);
  }
  const double var = variance(at_one);
  const double se = var * std::sqrt(2.0 / (seeds - 1));
  CHECK(std::abs(var - kernels::rho2_log1d(1.0)) <= 3.0 * se);
}

TEST_CASE("moving_average_field: s = 0.05 and s = 0.2 second moments agree (scale invariance)") {
  FourierFieldSpec spec;
  spec.lambda = 4000;
  spec.box_l = 5.0;
  const int seeds = 600;
  RngStream rng(77);
  std::vector<double> diff_a, diff_b;
  for (int i = 0; i < seeds; ++i) {
    RngStream stream = rng.substream(i);
    const auto coeffs = sampling::draw_fourier_coefficients(spec, stream);
    const auto pa = sampling::moving_average_field(coeffs, spec, 0.05, {0.5, 1.5});
    const auto pb = sampling::moving_average_field(coeffs, spec, 0.2, {0.5, 1.5});
    diff_a.push_back(pa.values[1] - pa.values[0]);
    diff_b.push_back(pb.values[1] - pb.values[0]);
  }
  const double va = variance(diff_a), vb = variance(diff_b);
  const double se = (va + vb) * std::sqrt(2.0 / (seeds - 1));
  CHECK(std::abs(va - vb) <= 3.0 * se);
}

TEST_CASE("cholesky_sample: two-point grid gives variance 4 log 2") {
  const std::vector<double> grid{0.0, 1.0};
  RngStream rng(55);
  const int draws = 10000;
  std::vector<double> at_one;
  for (int i = 0; i < draws; ++i) {
    RngStream stream = rng.substream(i);
    const auto path = sampling::cholesky_sample(CovarianceModel::log1d(), grid, stream);
    CHECK(path.values[0] == 0.0);
    at_one.push_back(path.values[1]);
  }
  const double var = variance(at_one);
  const double target = 4.0 * std::log(2.0);
  const double se = var * std::sqrt(2.0 / (draws - 1));
  CHECK(std::abs(var - target) <= 3.0 * se);
}

TEST_CASE("cholesky_sample: empirical covariance matches the pinned covariance") {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) grid.push_back(i / 16.0);
  const auto model = CovarianceModel::log1d();
  const int draws = 10000;
  RngStream rng(555);
  std::vector<std::vector<double>> paths;
  paths.reserve(draws);
  for (int i = 0; i < draws; ++i) {
    RngStream stream = rng.substream(i);
    paths.push_back(sampling::cholesky_sample(model, grid, stream).values);
  }
  const auto cov_of = [&](int a, int b) {
    double acc = 0.0;
    for (const auto& p : paths) acc += p[a] * p[b];
    return acc / (draws - 1);
  };
  const auto rho2 = [&](double r) { return kernels::rho2(model, r); };
  for (int a = 4; a <= 16; a += 6) {
    for (int b = a; b <= 16; b += 6) {
      const double analytic =
          0.5 * (rho2(grid[a]) + rho2(grid[b]) - rho2(std::abs(grid[a] - grid[b])));
      const double sd_a = std::sqrt(rho2(grid[a]));
      const double sd_b = std::sqrt(rho2(grid[b]));
      const double se = (sd_a * sd_b + std::abs(analytic)) / std::sqrt(static_cast<double>(draws));
      CHECK(std::abs(cov_of(a, b) - analytic) <= 3.0 * se);
    }
  }
}

TEST_CASE("cholesky_sample: brownian-walk model has independent N(0, du) increments") {
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(i * 0.25);
  RngStream rng(31337);
  const int draws = 8000;
  std::vector<std::vector<double>> increments(8);
  for (int d = 0; d < draws; ++d) {
    RngStream stream = rng.substream(d);
    const auto path = sampling::cholesky_sample(CovarianceModel::brownian_walk(), grid, stream);
    for (int j = 0; j < 8; ++j) increments[j].push_back(path.values[j + 1] - path.values[j]);
  }
  for (int j = 0; j < 8; ++j) {
    const double v = variance(increments[j]);
    CHECK(std::abs(v - 0.25) <= 3.0 * 0.25 * std::sqrt(2.0 / (draws - 1)));
  }
  // adjacent increments uncorrelated
  double cross = 0.0;
  for (int d = 0; d < draws; ++d) cross += increments[0][d] * increments[1][d];
  cross /= draws - 1;
  CHECK(std::abs(cross) <= 3.0 * 0.25 / std::sqrt(static_cast<double>(draws)));
}

TEST_CASE("cholesky_sample: invalid variogram is reported as NotPsd") {
  // alpha = 3 is outside the fBm range: |x-y|^3 is not conditionally negative
  // definite, so the pinned 'covariance' it induces is indefinite
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(i / 4.0);
  RngStream rng(9);
  CHECK_THROWS_AS(sampling::cholesky_sample(CovarianceModel::power_law(3.0, 1.0), grid, rng),
                  NotPsd);
}

TEST_CASE("cholesky_sample: rejects duplicate grid points") {
  RngStream rng(1);
  CHECK_THROWS_AS(
      sampling::cholesky_sample(CovarianceModel::log1d(), std::vector<double>{0.0, 0.5, 0.5}, rng),
      DomainError);
}

TEST_CASE("brownian_path: definition checks") {
  RngStream rng(2);
  const auto single = sampling::brownian_path({0.0, 1.0}, rng);
  CHECK(single.values[0] == 0.0);

  const int draws = 10000;
  std::vector<double> at_one;
  RngStream master(222);
  for (int i = 0; i < draws; ++i) {
    RngStream stream = master.substream(i);
    at_one.push_back(sampling::brownian_path({0.0, 0.5, 1.0}, stream).values[2]);
  }
  const double var = variance(at_one);
  CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / (draws - 1)));

  // mean squared increment over pairs equals |x - y|
  std::vector<double> grid{0.0, 0.25, 0.75, 1.0};
  std::vector<double> sq;
  for (int i = 0; i < draws; ++i) {
    RngStream stream = master.substream(100000 + i);
    const auto path = sampling::brownian_path(grid, stream);
    sq.push_back((path.values[2] - path.values[1]) * (path.values[2] - path.values[1]));
  }
  CHECK(std::abs(mean(sq) - 0.5) <= 3.0 * 0.5 * std::sqrt(2.0 / draws));

  CHECK_THROWS_AS(sampling::brownian_path({0.5, 1.0}, rng), DomainError);
}

TEST_CASE("circulant_sample: matches the analytic covariance (log1d and brownian-ma)") {
  for (const auto& model : {CovarianceModel::log1d(), CovarianceModel::brownian_ma(1.0)}) {
    const int n = 64;
    const int draws = 4000;
    RngStream master(8080);
    std::vector<std::vector<double>> paths;
    for (int i = 0; i < draws; ++i) {
      RngStream stream = master.substream(i);
      paths.push_back(sampling::circulant_sample(model, n, 1.0, stream).values);
    }
    const auto rho2 = [&](double r) { return kernels::rho2(model, r); };
    for (int a : {8, 32, 64}) {
      for (int b : {16, 48}) {
        const double ua = a / 64.0, ub = b / 64.0;
        double acc = 0.0;
        for (const auto& p : paths) acc += p[a] * p[b];
        acc /= draws - 1;
        const double analytic = 0.5 * (rho2(ua) + rho2(ub) - rho2(std::abs(ua - ub)));
        const double se =
            (std::sqrt(rho2(ua) * rho2(ub)) + std::abs(analytic)) / std::sqrt(static_cast<double>(draws));
        CHECK(std::abs(acc - analytic) <= 3.5 * se);
      }
    }
  }
}

TEST_CASE("circulant_sample: determinism and validation") {
  RngStream a(42), b(42);
  const auto pa = sampling::circulant_sample(CovarianceModel::log1d(), 32, 1.0, a);
  const auto pb = sampling::circulant_sample(CovarianceModel::log1d(), 32, 1.0, b);
  CHECK(pa.values == pb.values);
  RngStream c(43);
  CHECK_THROWS_AS(sampling::circulant_sample(CovarianceModel::log1d(), 33, 1.0, c), DomainError);
}

TEST_CASE("path CSV carries metadata and data rows") {
  RngStream rng(4);
  const auto path = sampling::brownian_path({0.0, 0.5, 1.0}, rng);
  std::ostringstream out;
  sampling::write_path_csv(out, path);
  const std::string text = out.str();
  CHECK(text.rfind("# {", 0) == 0);
  CHECK(text.find("u,value") != std::string::npos);
  CHECK(text.find("brownian-walk") != std::string::npos);
}
