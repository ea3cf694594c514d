#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ctrplace/pareto.hpp"
#include "ctrplace/protocol_sim.hpp"
#include "ctrplace/reaction.hpp"

namespace py = pybind11;
using namespace ctrplace;

namespace {

std::vector<DelayPoint> sorted_points(const ParetoSet& s) { return s.sorted(); }

ParetoSet to_set(const std::vector<DelayPoint>& pts) {
  ParetoSet s;
  for (const auto& p : pts) s.add_prune(p);
  return s;
}

}  // namespace

PYBIND11_MODULE(_ctrplace, m) {
  py::register_exception<EnumerationCapExceeded>(m, "EnumerationCapExceeded");

  py::class_<Topology>(m, "Topology")
      .def_property_readonly("name", &Topology::name)
      .def_property_readonly("node_count", &Topology::node_count)
      .def("edges", [](const Topology& t) {
        std::vector<std::tuple<NodeId, NodeId, double>> out;
        for (const auto& e : t.edges()) out.emplace_back(e.u, e.v, e.latency_ms);
        return out;
      });

  py::class_<DelayMatrix>(m, "DelayMatrix")
      .def_static("from_rows", &DelayMatrix::from_rows)
      .def("__len__", &DelayMatrix::size)
      .def("__call__", [](const DelayMatrix& d, NodeId i, NodeId j) { return d(i, j); })
      .def("rows", [](const DelayMatrix& d) {
        std::vector<std::vector<double>> out;
        for (NodeId i = 0; i < static_cast<NodeId>(d.size()); ++i) {
          const auto r = d.row(i);
          out.emplace_back(r.begin(), r.end());
        }
        return out;
      });

  py::class_<Placement>(m, "Placement")
      .def(py::init<std::vector<NodeId>, std::size_t>(), py::arg("controllers"),
           py::arg("node_count"))
      .def("nodes", &Placement::nodes)
      .def("__len__", &Placement::size)
      .def("__str__", &Placement::to_string)
      .def("__eq__", [](const Placement& a, const Placement& b) { return a == b; });

  py::class_<DelayPoint>(m, "DelayPoint")
      .def(py::init([](double sw, double cc, Placement p) { return DelayPoint{sw, cc, std::move(p)}; }),
           py::arg("sw_ctr"), py::arg("ctr_ctr"), py::arg("placement") = Placement({0}, 1))
      .def_readonly("sw_ctr", &DelayPoint::sw_ctr)
      .def_readonly("ctr_ctr", &DelayPoint::ctr_ctr)
      .def_readonly("placement", &DelayPoint::placement)
      .def("__repr__", [](const DelayPoint& p) { return "DelayPoint(" + to_csv_row(p) + ")"; });

  m.def("load_topology", [](const std::filesystem::path& path, double speed) {
    return load_topology(path, LoadOptions{speed});
  }, py::arg("path"), py::arg("speed_km_per_ms") = kDefaultSpeedKmPerMs);
  m.def("linear_topology", &linear_topology, py::arg("n"), py::arg("hop_delay_ms") = 1.0);
  m.def("all_pairs_delays", &all_pairs_delays);
  m.def("placement_count", &placement_count);
  m.def("evaluate_placement", &evaluate_placement);
  m.def("assign_masters", [](const DelayMatrix& d, const Placement& p) {
    return assign_masters(d, p).master_of;
  });

  m.def("exa_place", [](const DelayMatrix& d, std::size_t c, std::uint64_t cap) {
    ExaPlaceResult r = exa_place(d, c, cap);
    return py::make_tuple(sorted_points(r.frontier), r.evaluated);
  }, py::arg("delays"), py::arg("controllers"), py::arg("cap") = kDefaultEnumerationCap);
  m.def("rnd_place", [](const DelayMatrix& d, std::size_t c, std::size_t it, std::uint64_t seed) {
    return sorted_points(rnd_place(d, c, SearchBudget{it, seed}));
  }, py::arg("delays"), py::arg("controllers"), py::arg("iterations"), py::arg("seed"));
  m.def("evo_place", [](const Topology& t, const DelayMatrix& d, std::size_t c, std::size_t it,
                        std::uint64_t seed) {
    return sorted_points(evo_place(d, c, SearchBudget{it, seed}, t));
  }, py::arg("topology"), py::arg("delays"), py::arg("controllers"), py::arg("iterations"),
        py::arg("seed"));
  m.def("frontier_errors", [](const std::vector<DelayPoint>& opt, const std::vector<DelayPoint>& approx) {
    const FrontierErrors e = frontier_errors(to_set(opt), to_set(approx));
    return py::make_tuple(e.sw_err, e.cc_err);
  });
  m.def("extreme_gains", [](const std::vector<DelayPoint>& f) {
    const ExtremeGains g = extreme_gains(to_set(f));
    return py::make_tuple(g.sw_ratio, g.cc_ratio);
  });
  m.def("ctr_ctr_reduction_factor", [](const std::vector<DelayPoint>& f) {
    return ctr_ctr_reduction_factor(to_set(f));
  });

  m.def("owner_sweep", [](const DelayMatrix& d, const Placement& p, const std::string& rule) {
    const OwnerSweep s = owner_sweep(d, p, parse_majority_rule(rule));
    py::dict out;
    out["avg_reaction_ms"] = s.avg_reaction_ms;
    out["optimal"] = s.optimal;
    out["min_reduction"] = s.min_reduction;
    out["max_reduction"] = s.max_reduction;
    return out;
  }, py::arg("delays"), py::arg("placement"), py::arg("rule") = "paper");
  m.def("avg_mdo_reaction", &avg_mdo_reaction);
  m.def("avg_sdo_reaction", [](const DelayMatrix& d, const Placement& p, ControllerIndex leader,
                               const std::string& rule) {
    return avg_sdo_reaction(d, ClusterView::with_nearest_masters(d, p, leader),
                            parse_majority_rule(rule));
  }, py::arg("delays"), py::arg("placement"), py::arg("leader"), py::arg("rule") = "paper");
  m.def("scenario_table", [](const std::string& s, std::size_t n_sw, double t_c,
                             const std::string& rule) {
    return scenario_table(parse_scenario(s), n_sw, t_c, parse_majority_rule(rule));
  }, py::arg("scenario"), py::arg("n_sw"), py::arg("t_c_ms") = kDefaultTcMs,
        py::arg("rule") = "paper");
  m.def("simulate_sdo_update", [](const DelayMatrix& d, const Placement& p, ControllerIndex leader,
                                  NodeId sw, const std::string& rule) {
    return sim::simulate_sdo_update(d, ClusterView::with_nearest_masters(d, p, leader), sw,
                                    parse_majority_rule(rule)).time_ms;
  }, py::arg("delays"), py::arg("placement"), py::arg("leader"), py::arg("switch"),
        py::arg("rule") = "paper");
  m.def("sdo_reaction", [](const DelayMatrix& d, const Placement& p, ControllerIndex leader,
                           NodeId sw, const std::string& rule) {
    return sdo_reaction(d, ClusterView::with_nearest_masters(d, p, leader), sw,
                        parse_majority_rule(rule));
  }, py::arg("delays"), py::arg("placement"), py::arg("leader"), py::arg("switch"),
        py::arg("rule") = "paper");
}
