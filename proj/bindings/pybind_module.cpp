#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dubinspair/runner.hpp"
#include "dubinspair/version.hpp"

namespace py = pybind11;

namespace {

using namespace dubinspair;

Solution solve_scenario(const ScenarioFile& s, MethodChoice m) {
  if (m == MethodChoice::Fbsm) return fbsm_solve(s.bc, s.weights, s.solver);
  if (m == MethodChoice::Shooting) return shooting_solve(s.bc, s.weights, s.solver);
  Solution sweep = fbsm_solve(s.bc, s.weights, s.solver);
  Solution shot = shooting_solve(s.bc, s.weights, s.solver, sweep.costates.nodes.front());
  if (shot.report.converged) return shot;
  return sweep;
}

py::dict solve(const std::string& scenario_json, std::optional<std::string> method,
               std::optional<int> steps) {
  ScenarioFile s = parse_scenario(scenario_json);
  if (steps) {
    if (*steps < 2) throw ScenarioInvalid({"steps: must be at least 2"});
    s.steps = *steps;
    s.solver.steps = *steps;
  }
  MethodChoice m = s.method;
  if (method) {
    const auto parsed = method_from_name(*method);
    if (!parsed) throw ScenarioInvalid({"method: must be one of fbsm, shooting, both"});
    m = *parsed;
  }
  const Solution sol = solve_scenario(s, m);

  py::dict out;
  const SolveReport& rep = sol.report;
  out["method"] = rep.method;
  out["converged"] = rep.converged;
  out["iterations"] = rep.iterations;
  out["final_cost"] = rep.final_cost;
  out["terminal_residual"] =
      std::vector<double>(rep.terminal_residual.begin(), rep.terminal_residual.end());
  out["max_stationarity"] = rep.max_stationarity;
  out["hamiltonian_drift"] = rep.hamiltonian_drift;
  out["min_separation"] = rep.min_separation;

  const TimeGrid& g = sol.states.grid;
  std::vector<double> t;
  std::vector<std::vector<double>> states, controls, costates;
  t.reserve(g.steps() + 1);
  states.reserve(g.steps() + 1);
  controls.reserve(g.steps() + 1);
  costates.reserve(g.steps() + 1);
  for (int k = 0; k <= g.steps(); ++k) {
    t.push_back(g.time(k));
    const Vec6 x = to_array(sol.states.nodes[k]);
    states.emplace_back(x.begin(), x.end());
    const ControlPair& u = sol.controls.nodes[k];
    controls.push_back({u.u1, u.u2, u.v1, u.v2});
    const Costate& p = sol.costates.nodes[k];
    costates.push_back({p.p1, p.p2, p.p3, p.p4, p.p5, p.p6});
  }
  out["t"] = std::move(t);
  out["states"] = std::move(states);
  out["controls"] = std::move(controls);
  out["costates"] = std::move(costates);
  return out;
}

std::vector<std::string> validate(const std::string& scenario_json) {
  try {
    parse_scenario(scenario_json);
  } catch (const ScenarioInvalid& e) {
    return e.violations();
  }
  return {};
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "optimal steering for a pair of planar unit-speed vehicles";
  mod.attr("__version__") = kVersion;

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ScenarioInvalid& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });

  mod.def("solve", &solve, py::arg("scenario_json"), py::arg("method") = py::none(),
          py::arg("steps") = py::none(),
          "Solve a scenario given as a JSON string; returns the report plus the "
          "state, control, and costate trajectories.");
  mod.def("validate", &validate, py::arg("scenario_json"),
          "Parse and validate a scenario; returns the list of violations (empty "
          "when the scenario is valid).");
  mod.def("serialize", [](const std::string& scenario_json) {
    return serialize_scenario(parse_scenario(scenario_json));
  }, py::arg("scenario_json"), "Canonical round-trip serialization of a scenario.");
}
