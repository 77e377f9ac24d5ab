#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gsample/costs.hpp"
#include "gsample/errors.hpp"
#include "gsample/greedy.hpp"
#include "gsample/harness.hpp"
#include "gsample/pgd.hpp"
#include "gsample/properties.hpp"

namespace py = pybind11;
using namespace gsample;

namespace {

std::shared_ptr<const ProblemInstance> instance_from_config(const std::string& config_json) {
  return build_experiment(parse_config(config_json)).instance;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph-signal sampling allocation core";

  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);

  py::class_<WeightedGraph>(m, "WeightedGraph")
      .def(py::init([](int n, const std::vector<std::tuple<int, int, double>>& edges) {
             std::vector<Edge> e;
             for (const auto& [s, d, w] : edges) e.push_back({s, d, w});
             return WeightedGraph(n, e);
           }),
           py::arg("n"), py::arg("edges"))
      .def_property_readonly("n_nodes", &WeightedGraph::n_nodes)
      .def_property_readonly("n_edges", &WeightedGraph::n_edges)
      .def("is_connected", &WeightedGraph::is_connected)
      .def("laplacian", [](const WeightedGraph& g) { return build_laplacian(g); });

  py::class_<ProblemInstance, std::shared_ptr<ProblemInstance>>(m, "ProblemInstance")
      .def_static(
          "from_config", [](const std::string& json) { return std::const_pointer_cast<ProblemInstance>(instance_from_config(json)); },
          py::arg("config_json"))
      .def_property_readonly("size", &ProblemInstance::size)
      .def_property_readonly("mu", &ProblemInstance::mu)
      .def("h_m", &ProblemInstance::h_m)
      .def("h_r", &ProblemInstance::h_r)
      .def("noise_cov", &ProblemInstance::noise_cov)
      .def("laplacian", &ProblemInstance::laplacian);

  m.def(
      "cost",
      [](const std::string& kind, std::shared_ptr<ProblemInstance> inst, const Vec& d) {
        const auto k = parse_cost_kind(kind);
        return CostFunction(k, inst).value(SamplingVector::relaxed(d, inst->size()));
      },
      py::arg("kind"), py::arg("instance"), py::arg("d"));
  m.def(
      "gradient",
      [](const std::string& kind, std::shared_ptr<ProblemInstance> inst, const Vec& d) {
        const EstimatorState st = EstimatorState::build(inst, SamplingVector::relaxed(d, inst->size()));
        return cost_gradient(parse_cost_kind(kind), st).value;
      },
      py::arg("kind"), py::arg("instance"), py::arg("d"));
  m.def(
      "greedy_select",
      [](std::shared_ptr<ProblemInstance> inst, const std::string& kind, int budget, const std::string& fast_path) {
        GreedyConfig c;
        c.kind = parse_cost_kind(kind);
        c.budget = budget;
        c.fast_path = parse_fast_path(fast_path);
        const GreedyResult r = greedy_select(inst, c);
        return py::make_tuple(r.selected, r.cost_trace);
      },
      py::arg("instance"), py::arg("kind"), py::arg("budget"), py::arg("fast_path") = "off");
  m.def(
      "pgd_solve",
      [](std::shared_ptr<ProblemInstance> inst, const std::string& kind, int budget) {
        PgdConfig c;
        c.budget = budget;
        const PgdResult r = pgd_solve(inst, parse_cost_kind(kind), c);
        return py::make_tuple(r.selected, r.relaxed, r.projected_trace);
      },
      py::arg("instance"), py::arg("kind"), py::arg("budget"));
  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        std::vector<ResultRecord> recs;
        {
          py::gil_scoped_release release;
          recs = run_experiment(parse_config(config_json));
        }
        return format_results(recs);
      },
      py::arg("config_json"), "Runs an experiment config and returns the CSV text.");
  m.def("csv_header", [] { return std::string(kCsvHeader); });
}
