#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "polarprox/polar.hpp"
#include "polarprox/scenario.hpp"
#include "polarprox/solver.hpp"

namespace py = pybind11;
using namespace polarprox;

namespace {

LiftedPoint make_point(const std::vector<double>& base, double height) {
  LiftedPoint p{Vector(base.size()), height};
  for (size_t i = 0; i < base.size(); ++i) p.base(i) = base[i];
  return p;
}

std::vector<double> base_list(const LiftedPoint& p) {
  return {p.base.data(), p.base.data() + p.base.size()};
}

/// Gauge handle with the optional function spec that built it.
struct PyGauge {
  GaugePtr gauge;
  std::optional<ConvexFunctionSpec> function;
};

py::dict prox_to_dict(const PolarProxResult& r) {
  py::dict d;
  d["prox_base"] = base_list(r.prox_point);
  d["prox_height"] = r.prox_point.height;
  d["envelope"] = r.envelope_value;
  d["radius"] = r.radius;
  d["case"] = prox_case_name(r.case_tag);
  d["bisection_iters"] = r.bisection_iters;
  d["residual"] = r.residual;
  return d;
}

py::dict trace_to_dict(const SolverTrace& t) {
  py::dict d;
  d["status"] = solver_status_name(t.status);
  d["steps"] = t.steps;
  d["final_base"] = base_list(t.final_point);
  d["final_height"] = t.final_point.height;
  d["shadow_height"] = t.final_shadow.height;
  d["residual"] = t.final_residual;
  d["residuals"] = t.residuals;
  py::list iterates;
  for (const auto& p : t.iterates) iterates.append(base_list(p));
  d["iterate_bases"] = iterates;
  return d;
}

SolverConfig config_from_kwargs(double alpha, double gamma, int max_iterations,
                                double fixed_point_tolerance) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  cfg.gamma = gamma;
  cfg.max_iterations = max_iterations;
  cfg.fixed_point_tolerance = fixed_point_tolerance;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(polarprox, m) {
  m.doc() = "polar envelopes, polar proximal maps, and projected polar proximal iterations";

  py::class_<PyGauge>(m, "Gauge")
      .def("eval",
           [](const PyGauge& g, const std::vector<double>& base, double height) {
             return g.gauge->eval(make_point(base, height));
           },
           py::arg("base"), py::arg("height"))
      .def("sublevel_project",
           [](const PyGauge& g, double r, const std::vector<double>& base, double height) {
             const LiftedPoint q = g.gauge->sublevel_project(r, make_point(base, height));
             return py::make_tuple(base_list(q), q.height);
           },
           py::arg("r"), py::arg("base"), py::arg("height"))
      .def("domain_project",
           [](const PyGauge& g, const std::vector<double>& base, double height) {
             const LiftedPoint q = g.gauge->domain_project(make_point(base, height));
             return py::make_tuple(base_list(q), q.height);
           },
           py::arg("base"), py::arg("height"))
      .def("descriptor", [](const PyGauge& g) { return g.gauge->descriptor(); });

  m.def("gauge_from_json",
        [](const std::string& spec) {
          PyGauge g;
          g.gauge = cli::parse_gauge_json(spec, &g.function);
          return g;
        },
        py::arg("spec"), "build a gauge from the config-schema JSON gauge object");

  m.def("polar_envelope",
        [](const PyGauge& g, double alpha, const std::vector<double>& base, double height) {
          return polar_envelope(*g.gauge, alpha, make_point(base, height));
        },
        py::arg("gauge"), py::arg("alpha"), py::arg("base"), py::arg("height"));

  m.def("polar_prox",
        [](const PyGauge& g, double alpha, const std::vector<double>& base, double height) {
          return prox_to_dict(polar_prox(*g.gauge, alpha, make_point(base, height)));
        },
        py::arg("gauge"), py::arg("alpha"), py::arg("base"), py::arg("height"));

  m.def("radius_gap",
        [](const PyGauge& g, double alpha, const std::vector<double>& base, double height,
           double r) { return radius_gap(*g.gauge, alpha, make_point(base, height), r); },
        py::arg("gauge"), py::arg("alpha"), py::arg("base"), py::arg("height"), py::arg("r"));

  m.def("run_gp4a",
        [](const PyGauge& g, const std::vector<double>& start, double alpha, double gamma,
           int max_iterations, double fixed_point_tolerance) {
          const SolverConfig cfg =
              config_from_kwargs(alpha, gamma, max_iterations, fixed_point_tolerance);
          Vector v(start.size());
          for (size_t i = 0; i < start.size(); ++i) v(i) = start[i];
          return trace_to_dict(run_gp4a(*g.gauge, cfg, LiftedPoint::lift(v)));
        },
        py::arg("gauge"), py::arg("start"), py::arg("alpha") = 1.0, py::arg("gamma") = 0.0,
        py::arg("max_iterations") = 100000, py::arg("fixed_point_tolerance") = 1e-8);

  m.def("run_p4a",
        [](const std::string& function_spec, const std::vector<double>& v0, double alpha,
           double gamma, int max_iterations, double fixed_point_tolerance) {
          const ConvexFunctionSpec f = cli::parse_function_json(function_spec);
          const SolverConfig cfg =
              config_from_kwargs(alpha, gamma, max_iterations, fixed_point_tolerance);
          Vector v(v0.size());
          for (size_t i = 0; i < v0.size(); ++i) v(i) = v0[i];
          const P4aResult r = run_p4a(f, alpha, v, cfg);
          py::dict d = trace_to_dict(r.trace);
          d["minimizer"] = std::vector<double>(
              r.minimizer_estimate.data(),
              r.minimizer_estimate.data() + r.minimizer_estimate.size());
          return d;
        },
        py::arg("function"), py::arg("v0"), py::arg("alpha") = 1.0, py::arg("gamma") = 0.0,
        py::arg("max_iterations") = 100000, py::arg("fixed_point_tolerance") = 1e-8);

  m.def("list_builtins", [] {
    std::vector<std::string> names;
    for (const auto& info : cli::list_builtin_scenarios()) names.push_back(info.name);
    return names;
  });

  m.def("run_scenario",
        [](const std::string& config_path, const std::string& out_dir) {
          cli::RunOptions opts;
          opts.out_dir = out_dir;
          return cli::run_scenario(cli::load_scenario_file(config_path), opts);
        },
        py::arg("config_path"), py::arg("out_dir") = ".");

  m.def("run_builtin",
        [](const std::string& name, const std::string& out_dir) {
          cli::RunOptions opts;
          opts.out_dir = out_dir;
          return cli::run_scenario(cli::load_builtin_scenario(name), opts);
        },
        py::arg("name"), py::arg("out_dir") = ".");
}
