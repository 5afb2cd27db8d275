#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carnot/diffops.hpp"
#include "carnot/hardy.hpp"
#include "cli.hpp"

namespace py = pybind11;
using namespace carnot;

namespace {

Point to_point(const std::vector<double>& v) {
  if (v.size() > static_cast<std::size_t>(kMaxDim)) throw InvalidArgument("point has too many coordinates");
  Point x(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<Eigen::Index>(i)] = v[i];
  return x;
}

std::vector<double> to_list(const Vector& x) { return {x.data(), x.data() + x.size()}; }

QuadratureConfig make_config(const std::string& method, std::uint64_t budget, std::uint64_t seed, double tol) {
  QuadratureConfig c;
  c.method = parse_quadrature_method(method);
  c.budget = budget;
  c.seed = seed;
  c.target_rel_tol = tol;
  c.validate();
  return c;
}

py::dict result_dict(const IntegrationResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["error_estimate"] = r.error_estimate;
  d["evals"] = r.evals;
  d["tolerance_met"] = r.tolerance_met;
  return d;
}

py::dict report_dict(const HardyReport& r) {
  py::dict d;
  d["group"] = r.group;
  d["alpha"] = r.alpha;
  d["method"] = std::string(to_string(r.method));
  d["numerator"] = result_dict(r.numerator);
  d["denominator"] = result_dict(r.denominator);
  d["quotient"] = r.quotient;
  d["quotient_error"] = r.quotient_error;
  d["sharp_constant"] = r.sharp_constant;
  d["relative_gap"] = r.relative_gap;
  d["relative_gap_error"] = r.relative_gap_error;
  d["tolerance_met"] = r.tolerance_met;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Carnot-group calculus and sharp Hardy inequalities";
  m.attr("__version__") = cli::kVersion;

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DegenerateTestFunction>(m, "DegenerateTestFunction", PyExc_ArithmeticError);
  py::register_exception<ToleranceNotMet>(m, "ToleranceNotMet", PyExc_RuntimeError);
  py::register_exception<NonFiniteSample>(m, "NonFiniteSample", PyExc_ArithmeticError);

  py::class_<GroupSpec>(m, "Group")
      .def(py::init([](const std::string& name) { return builtin_group(name); }), py::arg("name"))
      .def_property_readonly("name", &GroupSpec::name)
      .def_property_readonly("dim", &GroupSpec::dim)
      .def_property_readonly("horizontal_dim", &GroupSpec::horizontal_dim)
      .def_property_readonly("homogeneous_dimension", &GroupSpec::homogeneous_dimension)
      .def_property_readonly("weights", [](const GroupSpec& g) { return g.weights().exponents; })
      .def("multiply", [](const GroupSpec& g, const std::vector<double>& x,
                          const std::vector<double>& y) { return to_list(multiply(g, to_point(x), to_point(y))); })
      .def("dilate", [](const GroupSpec& g, double lambda,
                        const std::vector<double>& x) { return to_list(dilate(g, lambda, to_point(x))); })
      .def("norm", [](const GroupSpec& g, const std::vector<double>& x) { return homogeneous_norm(g, to_point(x)); })
      .def("horizontal_gradient_of_norm",
           [](const GroupSpec& g, const std::vector<double>& x) {
             const Point p = to_point(x);
             return to_list(horizontal_gradient(g, norm_jet<1>(g, p), p));
           })
      .def("fundamental_solution",
           [](const GroupSpec& g, const std::vector<double>& x) { return fundamental_solution(g, to_point(x)); })
      .def("__repr__", [](const GroupSpec& g) { return "<Group " + g.name() + ">"; });

  m.def("builtin_groups", &builtin_group_names);
  m.def("sharp_constant", &sharp_constant, py::arg("Q"), py::arg("alpha") = 0.0);
  m.def("optimal_beta", &optimal_beta, py::arg("Q"), py::arg("alpha") = 0.0);
  m.def("folland_constant", &folland_constant, py::arg("Q"));

  m.def(
      "identity_battery",
      [](const GroupSpec& g, int samples, std::uint64_t seed) {
        IdentityBatteryOptions opts;
        opts.samples = samples;
        opts.seed = seed;
        py::list out;
        for (const auto& c : identity_battery(g, opts)) {
          py::dict d;
          d["name"] = c.name;
          d["max_residual"] = c.max_residual;
          d["threshold"] = c.threshold;
          d["passed"] = c.passed;
          out.append(d);
        }
        return out;
      },
      py::arg("group"), py::arg("samples") = 1000, py::arg("seed") = 1);

  m.def(
      "radial_quotient",
      [](const GroupSpec& g, double alpha, double L, double r_in, std::optional<double> beta) {
        const HardyProblem p(g, alpha);
        const auto phi = TestFunction::log_sine(beta.value_or(optimal_beta(p.homogeneous_dimension(), alpha)), r_in, L);
        return report_dict(rayleigh_quotient(p, phi, QuadratureConfig{}, QuotientMethod::radial_1d));
      },
      py::arg("group"), py::arg("alpha"), py::arg("L"), py::arg("r_in") = 1.0, py::arg("beta") = py::none());

  m.def(
      "full_quotient",
      [](const GroupSpec& g, double alpha, double L, double r_in, const std::string& method, std::uint64_t budget,
         std::uint64_t seed) {
        const HardyProblem p(g, alpha);
        const auto phi = TestFunction::log_sine(optimal_beta(p.homogeneous_dimension(), alpha), r_in, L);
        py::gil_scoped_release release;
        auto r = rayleigh_quotient(p, phi, make_config(method, budget, seed, 1e-2), QuotientMethod::full_dim);
        py::gil_scoped_acquire acquire;
        return report_dict(r);
      },
      py::arg("group"), py::arg("alpha"), py::arg("L"), py::arg("r_in") = 1.0, py::arg("method") = "mc",
      py::arg("budget") = 100000, py::arg("seed") = 1);

  m.def(
      "inequality_battery",
      [](const GroupSpec& g, double alpha, int count, std::uint64_t seed, const std::string& method,
         std::uint64_t budget) {
        const HardyProblem p(g, alpha);
        py::list out;
        for (const auto& row : inequality_battery(p, count, seed, make_config(method, budget, seed, 1e-2))) {
          out.append(report_dict(row.report));
        }
        return out;
      },
      py::arg("group"), py::arg("alpha"), py::arg("count"), py::arg("seed") = 1, py::arg("method") = "mc",
      py::arg("budget") = 100000);

  m.def(
      "sharpness_sweep",
      [](const GroupSpec& g, double alpha, const std::vector<double>& L_grid, double r_in) {
        const auto s = sharpness_sweep(HardyProblem(g, alpha), L_grid, r_in);
        py::list rows;
        for (const auto& r : s.rows) {
          py::dict d;
          d["L"] = r.L;
          d["quotient"] = r.quotient;
          d["predicted"] = r.predicted;
          d["deviation"] = r.deviation;
          rows.append(d);
        }
        py::dict d;
        d["sharp_constant"] = s.sharp_constant;
        d["gap_slope"] = s.gap_slope;
        d["rows"] = rows;
        return d;
      },
      py::arg("group"), py::arg("alpha"), py::arg("L_grid"), py::arg("r_in") = 1.0);

  m.def("decade_grid", &decade_grid, py::arg("decades"));

  m.def(
      "ball_volume",
      [](const GroupSpec& g, double R, std::uint64_t budget, std::uint64_t seed) {
        return result_dict(ball_volume(g, R, make_config("mc", budget, seed, 1e-2)));
      },
      py::arg("group"), py::arg("R"), py::arg("budget") = 100000, py::arg("seed") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one carnot command line; returns (exit code, stdout text, stderr text).");
}
