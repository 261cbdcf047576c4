#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "logfield/errors.hpp"
#include "logfield/kernels.hpp"
#include "logfield/regularity.hpp"
#include "logfield/rng.hpp"
#include "logfield/sampling.hpp"

using namespace logfield;
using kernels::CovarianceModel;
using regularity::Modulus;
using regularity::ModulusForm;

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return grid;
}

kernels::MetricProfile brownian_profile() {
  return kernels::metric_profile(CovarianceModel::brownian_walk(), log_grid(1e-6, 0.9, 60));
}

kernels::MetricProfile log1d_profile() {
  return kernels::metric_profile(CovarianceModel::log1d(), log_grid(1e-6, 0.9, 60));
}

}  // namespace

TEST_CASE("covering_number: Brownian metric reproduces 1 + Floor(1/(2 eps^2))") {
  const auto profile = brownian_profile();
  for (double eps : {0.5, 0.1, 0.01}) {
    // same integer snap as the implementation: 1/(2*0.1^2) rounds below 50
    const long long expected =
        1 + static_cast<long long>(std::floor(1.0 / (2.0 * eps * eps) + 1e-9));
    CHECK(regularity::covering_number(profile, eps) == expected);
  }
  // non-integer 1/(2 eps^2) cases
  CHECK(regularity::covering_number(profile, 0.3) ==
        1 + static_cast<long long>(std::floor(1.0 / (2.0 * 0.09))));
  // one ball of any radius >= diameter covers everything
  CHECK(regularity::covering_number(profile, 1.0) == 1);
  CHECK(regularity::covering_number(profile, 2.5) == 1);
}

TEST_CASE("covering_number: log1d counts approach eps^-1 sqrt(-log eps)/sqrt(2)") {
  // the half-width greedy covering carries a 1/sqrt(2) against the paper's
  // coarser radius convention; the shape eps^-1 sqrt(-log eps) is the same
  const auto profile = log1d_profile();
  double previous = 1e9;
  for (double eps : {1e-4, 1e-8, 1e-12}) {
    const double n = static_cast<double>(regularity::covering_number(profile, eps));
    const double ratio = n * eps / std::sqrt(-std::log(eps)) * std::sqrt(2.0);
    CHECK(ratio > 1.0);
    CHECK(ratio < previous);  // decreasing toward 1
    previous = ratio;
  }
  CHECK(previous < 1.08);
}

TEST_CASE("rho_inverse: exact for Brownian, bisection elsewhere") {
  const auto profile = log1d_profile();
  const double eps = 0.01;
  const double r = regularity::rho_inverse(profile, eps);
  CHECK(profile.rho(r) == doctest::Approx(eps).epsilon(1e-10));
  CHECK(regularity::rho_inverse(brownian_profile(), 0.2) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("dudley_integral: J(0) = 0 and domain checks") {
  const auto covering = regularity::covering_profile(brownian_profile(), 1e-6);
  CHECK(regularity::dudley_integral(covering, 0.0) == 0.0);
  CHECK_THROWS_AS(regularity::dudley_integral(covering, covering.diameter * 1.5), DomainError);
}

TEST_CASE("dudley_integral: Brownian asymptote delta sqrt(-2 log delta)") {
  const auto covering = regularity::covering_profile(brownian_profile(), 1e-8);
  for (double delta : {1e-4, 1e-5, 1e-6}) {
    const double j = regularity::dudley_integral(covering, delta);
    const double ratio = j / (delta * std::sqrt(-2.0 * std::log(delta)));
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
  }
}

TEST_CASE("dudley_integral: log1d asymptote delta sqrt(log(1/delta))") {
  const auto covering = regularity::covering_profile(log1d_profile(), 1e-8);
  for (double delta : {1e-12, 1e-13}) {
    const double j = regularity::dudley_integral(covering, delta);
    const double ratio = j / (delta * std::sqrt(std::log(1.0 / delta)));
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
  }
}

TEST_CASE("J is nondecreasing and J(delta)/delta is nonincreasing") {
  const auto covering = regularity::covering_profile(log1d_profile(), 1e-7);
  double last_j = 0.0;
  double last_slope = 1e300;
  for (double delta : log_grid(1e-6, 0.5 * covering.diameter, 25)) {
    const double j = regularity::dudley_integral(covering, delta);
    CHECK(j >= last_j - 1e-12);
    const double slope = j / delta;
    CHECK(slope <= last_slope * (1.0 + 1e-6));
    last_j = j;
    last_slope = slope;
  }
}

TEST_CASE("modulus: log1d tabulation is r log(1/r) shaped (constant ratio)") {
  const auto profile = kernels::metric_profile(CovarianceModel::log1d(), log_grid(1e-7, 0.2, 40));
  const auto mod = regularity::modulus(profile);
  CHECK(mod.closed_form == ModulusForm::RLogInv);
  const double ratio_mid = mod.eval(1e-4) / (1e-4 * std::log(1e4));
  const double ratio_fine = mod.eval(1e-6) / (1e-6 * std::log(1e6));
  CHECK(std::abs(ratio_fine / ratio_mid - 1.0) < 0.10);
}

TEST_CASE("modulus: closed-form descriptors per family") {
  const auto grid = log_grid(1e-6, 0.2, 30);
  CHECK(regularity::modulus(kernels::metric_profile(CovarianceModel::brownian_ma(1.0), grid)).closed_form ==
        ModulusForm::RLogInv);
  CHECK(regularity::modulus(kernels::metric_profile(CovarianceModel::brownian_walk(), grid)).closed_form ==
        ModulusForm::SqrtRLogInv);
  const auto power = regularity::modulus(
      kernels::metric_profile(CovarianceModel::power_law(-0.5, 1.0), grid));
  CHECK(power.closed_form == ModulusForm::PowerLog);
  CHECK(power.power_alpha == -0.5);
}

TEST_CASE("modulus: linear-rho families share the same omega shape") {
  // BrownianMA (1d) and Log3D both have rho ~ r, hence the same J shape up to
  // constants; their omega tables have a constant ratio
  const auto grid = log_grid(1e-5, 0.2, 25);
  const auto ma = regularity::modulus(kernels::metric_profile(CovarianceModel::brownian_ma(1.0), grid));
  const auto log3d = regularity::modulus(kernels::metric_profile(CovarianceModel::log3d(), grid));
  const double r0 = ma.eval(1e-5) / log3d.eval(1e-5);
  const double r1 = ma.eval(1e-3) / log3d.eval(1e-3);
  CHECK(std::abs(r1 / r0 - 1.0) < 0.05);
}

TEST_CASE("omega composed with rho stays subadditive on sampled pairs") {
  const auto profile = kernels::metric_profile(CovarianceModel::log1d(), log_grid(1e-5, 0.2, 30));
  const auto covering = regularity::covering_profile(profile, 1e-7);
  const auto omega_rho = [&](double r) {
    return regularity::dudley_integral(covering, profile.rho(r));
  };
  RngStream rng(606);
  for (int trial = 0; trial < 15; ++trial) {
    const double r1 = 1e-4 + 0.05 * rng.uniform();
    const double r2 = 1e-4 + 0.05 * rng.uniform();
    CHECK(omega_rho(r1 + r2) <= omega_rho(r1) + omega_rho(r2) + 1e-6);
  }
}

TEST_CASE("lipschitz_statistic: trivial paths") {
  sampling::PathSample path;
  path.u_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  path.values = {1.0, 1.0, 1.0, 1.0, 1.0};
  CHECK(regularity::lipschitz_statistic(path, Modulus::analytic_form(ModulusForm::RLogInv), 0.25) ==
        0.0);

  for (std::size_t i = 0; i < path.u_grid.size(); ++i) path.values[i] = path.u_grid[i];
  CHECK(regularity::lipschitz_statistic(path, Modulus::analytic_form(ModulusForm::PlainR), 0.25) ==
        doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lipschitz_statistic: degenerate modulus is rejected") {
  sampling::PathSample path;
  path.u_grid = {0.0, 0.5, 1.0};
  path.values = {0.0, 1.0, 0.0};
  Modulus broken;
  broken.r_grid = {0.5, 1.0};
  broken.omega_values = {0.0, 0.0};
  CHECK_THROWS_AS(regularity::lipschitz_statistic(path, broken, 0.5), DegenerateModulus);
}

TEST_CASE("lipschitz_statistic: Levy constant for raw Brownian adjacent increments") {
  const int n = 4096;
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = static_cast<double>(i) / n;
  const auto levy = Modulus::analytic_form(ModulusForm::SqrtRLogInv);
  RngStream master(314159);
  std::vector<double> stats;
  for (int rep = 0; rep < 10; ++rep) {
    RngStream stream = master.substream(rep);
    const auto path = sampling::brownian_path(grid, stream);
    stats.push_back(regularity::lipschitz_statistic(path, levy, 1.0 / n));
  }
  std::sort(stats.begin(), stats.end());
  const double median = stats[stats.size() / 2];
  CHECK(median > 0.9);
  CHECK(median < 2.2);
}

TEST_CASE("refinement_study: smoke run with report serialization") {
  const std::vector<Modulus> moduli{Modulus::analytic_form(ModulusForm::RLogInv),
                                    Modulus::analytic_form(ModulusForm::PlainR)};
  RngStream rng(2718);
  const auto report =
      regularity::refinement_study(CovarianceModel::log1d(), moduli, {256, 512}, 8, rng);
  REQUIRE(report.stats.size() == 2);
  REQUIRE(report.stats[0].size() == 2);
  CHECK(report.stats[0][0].median > 0.0);
  CHECK(report.median_ratio(0) > 0.0);

  std::ostringstream json_out, csv_out;
  regularity::write_report_json(json_out, report);
  regularity::write_report_csv(csv_out, report);
  CHECK(json_out.str().find("median_ratio") != std::string::npos);
  CHECK(csv_out.str().find("modulus,grid_size") != std::string::npos);
}
