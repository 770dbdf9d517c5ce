#include <string>
#include <utility>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptim/errors.hpp"
#include "ptim/incidents.hpp"
#include "ptim/network.hpp"
#include "ptim/report.hpp"
#include "ptim/scenario.hpp"
#include "ptim/uav.hpp"

namespace py = pybind11;
using namespace ptim;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Proactive incident-management simulation core";

  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ModelDomainError>(m, "ModelDomainError", PyExc_ArithmeticError);
  py::register_exception<CapExceededError>(m, "CapExceededError", PyExc_RuntimeError);

  py::class_<GridNetwork>(m, "GridNetwork")
      .def_property_readonly("rows", &GridNetwork::rows)
      .def_property_readonly("cols", &GridNetwork::cols)
      .def_property_readonly("cell_count", &GridNetwork::cell_count)
      .def_property_readonly("edge_count", &GridNetwork::edge_count)
      .def("travel_time",
           [](const GridNetwork& n, int a, int b) { return n.travel_time(CellId(a), CellId(b)); })
      .def("to_json", [](const GridNetwork& n) { return n.to_json().dump(); });

  m.def(
      "build_grid",
      [](int rows, int cols, double lo, double hi, std::uint64_t seed) {
        return build_grid(rows, cols, TimeRange{lo, hi}, seed);
      },
      py::arg("rows"), py::arg("cols"), py::arg("lo") = 0.1, py::arg("hi") = 1.5, py::arg("seed") = 1);

  py::class_<TrafficParams>(m, "TrafficParams")
      .def(py::init([](double s, double s1_mean, double s1_sd, double q, double r_var, double clearance) {
             TrafficParams p{s, s1_mean, s1_sd, q, r_var, clearance};
             p.validate();
             return p;
           }),
           py::arg("s"), py::arg("s1_mean"), py::arg("s1_sd"), py::arg("q"), py::arg("r_var"),
           py::arg("clearance"))
      .def_readwrite("s", &TrafficParams::s)
      .def_readwrite("s1_mean", &TrafficParams::s1_mean)
      .def_readwrite("s1_sd", &TrafficParams::s1_sd)
      .def_readwrite("q", &TrafficParams::q)
      .def_readwrite("r_var", &TrafficParams::r_var)
      .def_readwrite("clearance", &TrafficParams::clearance);

  m.def("sample_params", [](int severity, std::uint64_t seed) {
    return sample_incident(severity, CellId(0), 0.0, seed).params;
  });
  m.def("stochastic_delay", &stochastic_delay, py::arg("params"), py::arg("mean_duration"));
  m.def("stochastic_delay_variance", &stochastic_delay_variance, py::arg("params"),
        py::arg("mean_duration"));
  m.def("expected_delay", &expected_delay, py::arg("params"), py::arg("response_time"));
  m.def("delay_variance", &delay_variance, py::arg("params"), py::arg("response_time"));

  m.def("priority_benefit", &priority_benefit, py::arg("severity"), py::arg("sparsity"), py::arg("hazard"));
  m.def("hazard_reduction", [](int level) { return HazardIndex(level).reduction(); });
  m.def(
      "assimilate",
      [](double prior_mean, double prior_var, double obs_mean, double obs_var) {
        const DelayBelief post = assimilate({prior_mean, prior_var}, {obs_mean, obs_var});
        return std::make_pair(post.mean, post.variance);
      },
      py::arg("prior_mean"), py::arg("prior_var"), py::arg("obs_mean"), py::arg("obs_var"));

  m.def(
      "run_policy_json",
      [](const std::string& scenario, const std::string& policy) {
        nlohmann::json j;
        try {
          j = nlohmann::json::parse(scenario);
        } catch (const nlohmann::json::exception& e) {
          throw InputError(std::string("scenario is not valid JSON: ") + e.what());
        }
        const Scenario sc = Scenario::from_json(j);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_policy(sc, parse_policy(policy));
        }
        return to_json(r).dump();
      },
      py::arg("scenario"), py::arg("policy") = "proactive");
}
