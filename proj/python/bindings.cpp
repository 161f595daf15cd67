#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcsbp/classify.hpp"
#include "lcsbp/duality.hpp"
#include "lcsbp/formulas.hpp"
#include "lcsbp/manifest.hpp"
#include "lcsbp/report.hpp"
#include "lcsbp/simulate.hpp"
#include "lcsbp/specio.hpp"

namespace py = pybind11;
using namespace lcsbp;

namespace {

SimConfig make_config(std::uint64_t seed, std::size_t paths, double t_max, std::vector<double> grid, double dt,
                      double jump_rate, unsigned workers) {
  SimConfig c;
  c.seed = seed;
  c.n_paths = paths;
  c.t_max = t_max;
  c.grid = grid.empty() && std::isfinite(t_max) ? std::vector<double>{t_max} : std::move(grid);
  c.dt = dt;
  c.max_jump_rate = jump_rate;
  c.workers = workers;
  return c;
}

py::dict path_dict(const PathRecord& p) {
  py::dict d;
  d["times"] = p.times;
  d["values"] = p.values;
  d["absorbed_at"] = std::string(to_string(p.absorbed_at));
  d["absorption_time"] = p.absorption_time;
  d["killed"] = p.killed;
  return d;
}

py::list paths_list(const std::vector<PathRecord>& ps) {
  py::list out;
  for (auto& p : ps) out.append(path_dict(p));
  return out;
}

}  // namespace

PYBIND11_MODULE(_lcsbp, m) {
  m.doc() = "Logistic continuous-state branching processes: classification, formulas, simulation, duality";
  m.attr("__version__") = tool_version();

  py::register_exception<SpecParseError>(m, "SpecParseError", PyExc_ValueError);
  py::register_exception<InconclusiveError>(m, "InconclusiveError", PyExc_RuntimeError);

  py::class_<MechanismSpec>(m, "MechanismSpec")
      .def(py::init<>())
      .def_readwrite("lambda_", &MechanismSpec::lambda)
      .def_readwrite("sigma", &MechanismSpec::sigma)
      .def_readwrite("gamma", &MechanismSpec::gamma)
      .def_readwrite("c", &MechanismSpec::c)
      .def("to_json", [](const MechanismSpec& s) { return dump_spec(s); })
      .def("__repr__", [](const MechanismSpec& s) { return "MechanismSpec(" + dump_spec(s, -1) + ")"; });

  m.def("parse_spec", &parse_spec, py::arg("text"));
  m.def("load_spec", &load_spec, py::arg("path"));
  m.def("stable_mechanism", &stable_mechanism, py::arg("alpha"), py::arg("c"));
  m.def("truncate", py::overload_cast<const MechanismSpec&, double>(&lcsbp::truncate), py::arg("spec"), py::arg("k"));
  m.def("psi", &eval_psi, py::arg("spec"), py::arg("z"));

  m.def(
      "classify",
      [](const MechanismSpec& s, double theta) { return classify_report_json(classify_all(s, theta)); },
      py::arg("spec"), py::arg("theta") = 1.0, "Boundary report as a JSON string");

  py::class_<FormulaValue>(m, "FormulaValue")
      .def_readonly("value", &FormulaValue::value)
      .def_readonly("error", &FormulaValue::error)
      .def_readonly("degenerate", &FormulaValue::degenerate)
      .def_readonly("note", &FormulaValue::note);
  m.def("ou_laplace", &ou_laplace, py::arg("spec"), py::arg("z0"), py::arg("theta"), py::arg("s"));
  m.def("hitting_laplace", &hitting_laplace, py::arg("spec"), py::arg("z0"), py::arg("a"), py::arg("mu"));
  m.def("progeny_laplace", &progeny_laplace, py::arg("spec"), py::arg("z0"), py::arg("a"), py::arg("mu"));
  m.def("extinction_prob", &extinction_prob, py::arg("spec"), py::arg("z0"));
  m.def("stationary_laplace", &stationary_laplace, py::arg("spec"), py::arg("x"));
  m.def("exit_prob_u", &exit_prob_u, py::arg("spec"), py::arg("x0"));
  m.def("cumulant", &cumulant_ode, py::arg("spec"), py::arg("x"), py::arg("t"));

  m.def(
      "simulate_zmin",
      [](const MechanismSpec& s, double z0, std::uint64_t seed, std::size_t paths, double t_max,
         std::vector<double> grid, double dt, double jump_rate, unsigned workers) {
        std::vector<PathRecord> r;
        {
          py::gil_scoped_release nogil;
          r = simulate_zmin(s, z0, make_config(seed, paths, t_max, grid, dt, jump_rate, workers));
        }
        return paths_list(r);
      },
      py::arg("spec"), py::arg("z0"), py::arg("seed"), py::arg("paths") = 1000, py::arg("t_max") = 1.0,
      py::arg("grid") = std::vector<double>{}, py::arg("dt") = 1e-2, py::arg("jump_rate") = 1e4, py::arg("workers") = 0);
  m.def(
      "simulate_u",
      [](const MechanismSpec& s, double x0, bool entrance, std::uint64_t seed, std::size_t paths, double t_max,
         std::vector<double> grid, double dt, double jump_rate, unsigned workers) {
        std::vector<PathRecord> r;
        {
          py::gil_scoped_release nogil;
          r = simulate_u(s, x0, entrance ? UMode::entrance : UMode::absorb_at_zero,
                         make_config(seed, paths, t_max, grid, dt, jump_rate, workers));
        }
        return paths_list(r);
      },
      py::arg("spec"), py::arg("x0"), py::arg("entrance") = false, py::arg("seed") = 1, py::arg("paths") = 1000,
      py::arg("t_max") = 1.0, py::arg("grid") = std::vector<double>{}, py::arg("dt") = 1e-2,
      py::arg("jump_rate") = 1e4, py::arg("workers") = 0);

  m.def("generator_duality_residual", &generator_duality_residual, py::arg("spec"), py::arg("z"), py::arg("x"));
  m.def(
      "duality_check",
      [](const MechanismSpec& s, double z0, double x0, double t, std::uint64_t seed, std::size_t paths) {
        DualityConfig cfg;
        cfg.sim.seed = seed;
        cfg.sim.n_paths = paths;
        cfg.sim.max_jump_rate = 1e3;
        ZInfinity regime = classify_all(s).z_at_infinity;
        DualityCheck c;
        {
          py::gil_scoped_release nogil;
          c = run_duality_check(s, z0, x0, t, regime, cfg);
        }
        py::dict d;
        d["lhs"] = c.lhs.mean, d["lhs_se"] = c.lhs.se, d["rhs"] = c.rhs.mean, d["rhs_se"] = c.rhs.se;
        d["discrepancy"] = c.discrepancy, d["pass"] = c.pass, d["note"] = c.note;
        return d;
      },
      py::arg("spec"), py::arg("z0"), py::arg("x0"), py::arg("t"), py::arg("seed"), py::arg("paths") = 10000);
}
