#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "logfield/kernels.hpp"
#include "logfield/quadrature.hpp"
#include "logfield/regularity.hpp"
#include "logfield/resistance.hpp"
#include "logfield/rng.hpp"
#include "logfield/sampling.hpp"

namespace py = pybind11;
using namespace logfield;

namespace {

kernels::CovarianceModel make_model(const std::string& family, double alpha, double width_s) {
  kernels::CovarianceModel m;
  m.family = kernels::family_from_name(family);
  m.alpha = alpha;
  m.width_s = width_s;
  m.validate();
  return m;
}

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> out(v.size());
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> to_array(const Eigen::MatrixXd& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto buf = out.mutable_unchecked<2>();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) buf(i, j) = m(i, j);
  }
  return out;
}

py::dict path_to_dict(const sampling::PathSample& path) {
  py::dict d;
  d["u"] = to_array(path.u_grid);
  d["values"] = to_array(path.values);
  d["method"] = sampling::method_name(path.method);
  d["family"] = kernels::family_name(path.model.family);
  d["seed"] = path.seed;
  return d;
}

resistance::Graph make_graph(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<resistance::Edge> parsed;
  parsed.reserve(edges.size());
  for (const auto& [i, j, w] : edges) parsed.push_back({i, j, w});
  return resistance::Graph(n, std::move(parsed));
}

}  // namespace

PYBIND11_MODULE(_logfield, m) {
  m.doc() = "log-correlated Gaussian field toolkit: covariance kernels, exact "
            "samplers, Dudley moduli, and the graph resistance metric";

  py::register_exception<NonConvergence>(m, "NonConvergence");
  py::register_exception<TailBoundViolation>(m, "TailBoundViolation");
  py::register_exception<NotPsd>(m, "NotPsd");
  py::register_exception<RankDeficiency>(m, "RankDeficiency");
  py::register_exception<DisconnectedGraph>(m, "DisconnectedGraph", PyExc_ValueError);
  py::register_exception<DegenerateModulus>(m, "DegenerateModulus", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

  // kernels
  m.def("L", &kernels::L, py::arg("r"), "L(r) = (1/2) r^2 log r^2");
  m.def("f_log", &kernels::F_log, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
        "closed form of -int_a^b int_c^d log|x-y|");
  m.def("scale_anomaly_check", &kernels::scale_anomaly_check, py::arg("a"), py::arg("b"),
        py::arg("c"), py::arg("d"), py::arg("lam"));
  m.def("rho2_log1d", &kernels::rho2_log1d, py::arg("r"));
  m.def("rho2_brownian_ma", &kernels::rho2_brownian_ma, py::arg("r"), py::arg("s"));
  m.def("rho2_powerlaw", &kernels::rho2_powerlaw, py::arg("r"), py::arg("alpha"), py::arg("s"));
  m.def("g3d", &kernels::G_3d, py::arg("r"));
  m.def("g3d_small_r_constant", &kernels::g3d_small_r_constant);
  m.def(
      "rho2",
      [](const std::string& family, double r, double alpha, double width_s) {
        return kernels::rho2(make_model(family, alpha, width_s), r);
      },
      py::arg("family"), py::arg("r"), py::arg("alpha") = -0.5, py::arg("width_s") = 1.0);

  m.def(
      "metric_profile",
      [](const std::string& family, const std::vector<double>& r_grid, double alpha,
         double width_s) {
        const auto profile = kernels::metric_profile(make_model(family, alpha, width_s), r_grid);
        py::dict d;
        d["r"] = to_array(profile.r_grid());
        d["rho"] = to_array(profile.rho_values());
        d["small_r_asymptote"] = kernels::asymptote_name(profile.small_r_asymptote());
        return d;
      },
      py::arg("family"), py::arg("r_grid"), py::arg("alpha") = -0.5, py::arg("width_s") = 1.0);

  // numerics
  m.def(
      "integrate_1d",
      [](const std::function<double(double)>& f, double a, double b,
         const std::vector<double>& singularities) {
        quad::QuadratureSpec spec;
        spec.singularity_points = singularities;
        return quad::integrate_1d(f, a, b, spec);
      },
      py::arg("f"), py::arg("a"), py::arg("b"), py::arg("singularities") = std::vector<double>{});
  m.def(
      "double_integral_log_kernel",
      [](double a, double b, double c, double d, int n) {
        return quad::double_integral_oracle(
            [](double x, double y) { return -std::log(std::abs(x - y)); }, a, b, c, d, n,
            quad::log_diagonal_rule());
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"), py::arg("n") = 128,
      "brute-force tensor quadrature of -log|x-y| over a rectangle");

  // sampling
  m.def(
      "sample_fourier_ma",
      [](int lambda, double box_l, double s, const std::vector<double>& u_grid,
         std::uint64_t seed) {
        sampling::FourierFieldSpec spec;
        spec.lambda = lambda;
        spec.box_l = box_l;
        spec.seed = seed;
        RngStream rng(seed);
        const auto coeffs = sampling::draw_fourier_coefficients(spec, rng);
        return path_to_dict(sampling::moving_average_field(coeffs, spec, s, u_grid));
      },
      py::arg("lambda_modes"), py::arg("box_l"), py::arg("s"), py::arg("u_grid"), py::arg("seed"));
  m.def(
      "sample_cholesky",
      [](const std::string& family, const std::vector<double>& u_grid, std::uint64_t seed,
         double alpha, double width_s) {
        RngStream rng(seed);
        return path_to_dict(sampling::cholesky_sample(make_model(family, alpha, width_s), u_grid, rng));
      },
      py::arg("family"), py::arg("u_grid"), py::arg("seed"), py::arg("alpha") = -0.5,
      py::arg("width_s") = 1.0);
  m.def(
      "sample_brownian",
      [](const std::vector<double>& u_grid, std::uint64_t seed) {
        RngStream rng(seed);
        return path_to_dict(sampling::brownian_path(u_grid, rng));
      },
      py::arg("u_grid"), py::arg("seed"));
  m.def(
      "sample_circulant",
      [](const std::string& family, int n, double u_max, std::uint64_t seed, double alpha,
         double width_s) {
        RngStream rng(seed);
        return path_to_dict(sampling::circulant_sample(make_model(family, alpha, width_s), n, u_max, rng));
      },
      py::arg("family"), py::arg("n"), py::arg("u_max"), py::arg("seed"), py::arg("alpha") = -0.5,
      py::arg("width_s") = 1.0);

  // regularity
  m.def(
      "covering_number",
      [](const std::string& family, double eps, double alpha, double width_s) {
        std::vector<double> grid;
        for (int i = 0; i < 40; ++i) grid.push_back(1e-6 * std::pow(0.9 / 1e-6, i / 39.0));
        const auto profile = kernels::metric_profile(make_model(family, alpha, width_s), grid);
        return regularity::covering_number(profile, eps);
      },
      py::arg("family"), py::arg("eps"), py::arg("alpha") = -0.5, py::arg("width_s") = 1.0);
  m.def(
      "dudley_integral",
      [](const std::string& family, double delta, double alpha, double width_s) {
        std::vector<double> grid;
        for (int i = 0; i < 40; ++i) grid.push_back(1e-6 * std::pow(0.9 / 1e-6, i / 39.0));
        const auto profile = kernels::metric_profile(make_model(family, alpha, width_s), grid);
        return regularity::dudley_integral(regularity::covering_profile(profile, 1e-8), delta);
      },
      py::arg("family"), py::arg("delta"), py::arg("alpha") = -0.5, py::arg("width_s") = 1.0);
  m.def(
      "lipschitz_statistic",
      [](const std::vector<double>& u, const std::vector<double>& values,
         const std::string& modulus_form, double r_max, double power_alpha) {
        sampling::PathSample path;
        path.u_grid = u;
        path.values = values;
        regularity::ModulusForm form;
        if (modulus_form == "r-log-inv") form = regularity::ModulusForm::RLogInv;
        else if (modulus_form == "sqrt-r-log-inv") form = regularity::ModulusForm::SqrtRLogInv;
        else if (modulus_form == "power-log") form = regularity::ModulusForm::PowerLog;
        else if (modulus_form == "r") form = regularity::ModulusForm::PlainR;
        else if (modulus_form == "sqrt-r") form = regularity::ModulusForm::SqrtR;
        else throw DomainError("unknown modulus form: " + modulus_form);
        return regularity::lipschitz_statistic(
            path, regularity::Modulus::analytic_form(form, power_alpha), r_max);
      },
      py::arg("u"), py::arg("values"), py::arg("modulus_form"), py::arg("r_max") = 0.25,
      py::arg("power_alpha") = 0.0);

  // resistance
  m.def(
      "resistance_matrix",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges) {
        return to_array(resistance::solve(make_graph(n, edges)).R);
      },
      py::arg("n"), py::arg("edges"), "full effective-resistance matrix of a weighted graph");
  m.def(
      "variational_resistance",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges, int k, int l) {
        return resistance::variational_resistance(make_graph(n, edges), k, l);
      },
      py::arg("n"), py::arg("edges"), py::arg("k"), py::arg("l"));
  m.def(
      "resistance_mc",
      [](int n, const std::vector<std::tuple<int, int, double>>& edges, int k, int l, long samples,
         std::uint64_t seed) {
        RngStream rng(seed);
        const auto est = resistance::gaussian_variance_mc(make_graph(n, edges), k, l, samples, rng);
        return py::make_tuple(est.estimate, est.stderr_est);
      },
      py::arg("n"), py::arg("edges"), py::arg("k"), py::arg("l"), py::arg("samples") = 100000,
      py::arg("seed") = 0);
}
