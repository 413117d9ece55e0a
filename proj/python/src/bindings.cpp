// Python bindings: models, the relative index pipeline and the experiment harness.

#include "floquet/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace floquet;

namespace {

// Reports cross the boundary as JSON text; the Python side parses it.
std::string report_json(const RunReport& r, const ExperimentConfig& c) { return to_json(r, c).dump(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topological indices of periodically driven lattice systems";
  m.attr("__version__") = library_version;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<LatticeGeometry>(m, "LatticeGeometry")
      .def_readonly("L1", &LatticeGeometry::L1)
      .def_readonly("L2", &LatticeGeometry::L2)
      .def_readonly("n_orb", &LatticeGeometry::n_orb)
      .def_readonly("origin1", &LatticeGeometry::origin1)
      .def_readonly("origin2", &LatticeGeometry::origin2)
      .def_readonly("periodic1", &LatticeGeometry::periodic1)
      .def_readonly("periodic2", &LatticeGeometry::periodic2)
      .def("dim", &LatticeGeometry::dim)
      .def("index", &LatticeGeometry::index, py::arg("n1"), py::arg("n2"), py::arg("orbital"));
  m.def("centered_torus", &centered_torus, py::arg("L1"), py::arg("L2"), py::arg("n_orb"));

  py::class_<RestrictionMap>(m, "RestrictionMap")
      .def_readonly("source", &RestrictionMap::source)
      .def_readonly("target", &RestrictionMap::target);
  m.def("half_plane_map", &half_plane_map, py::arg("source"), py::arg("n1_begin"), py::arg("width"));

  py::class_<LatticeOperator>(m, "LatticeOperator")
      .def(py::init<LatticeGeometry, Matrix>(), py::arg("geometry"), py::arg("matrix"))
      .def_readonly("geometry", &LatticeOperator::geometry)
      .def_readonly("matrix", &LatticeOperator::m);

  py::class_<HoppingModel>(m, "HoppingModel")
      .def("bloch", &HoppingModel::bloch, py::arg("k1"), py::arg("k2"))
      .def("on", &HoppingModel::on, py::arg("geometry"))
      .def_readonly("n_orb", &HoppingModel::n_orb);
  m.def("chern_insulator", &chern_insulator, py::arg("mass"));

  py::class_<DriveProtocol>(m, "DriveProtocol")
      .def_readonly("period", &DriveProtocol::period)
      .def("translation_invariant", &DriveProtocol::translation_invariant)
      .def("breakpoints", &DriveProtocol::breakpoints)
      .def("one_period", [](const DriveProtocol& p) { return evolve(p).final_unitary(); });
  m.def("full_coupling", &full_coupling, py::arg("T"));
  m.def("five_step_drive", &five_step_drive, py::arg("geometry"), py::arg("J"), py::arg("delta"), py::arg("T"));
  m.def("static_drive", py::overload_cast<const HoppingModel&, const LatticeGeometry&, double>(&static_drive),
        py::arg("model"), py::arg("geometry"), py::arg("T"));
  m.def(
      "add_onsite_disorder",
      [](const DriveProtocol& p, double amplitude, std::uint64_t seed) {
        return add_onsite_disorder(p, {amplitude, seed});
      },
      py::arg("protocol"), py::arg("amplitude"), py::arg("seed"));

  m.def(
      "quasi_energy_phases", [](const Matrix& u) { return eigendecompose_unitary(u).phases; }, py::arg("unitary"));

  py::class_<IndexReport>(m, "IndexReport")
      .def_readonly("kind", &IndexReport::kind)
      .def_readonly("raw", &IndexReport::raw)
      .def_readonly("integer", &IndexReport::integer)
      .def_readonly("residual", &IndexReport::residual)
      .def_readonly("imag", &IndexReport::imag)
      .def_readonly("quantized", &IndexReport::quantized)
      .def_readonly("flags", &IndexReport::flags)
      .def("__repr__", [](const IndexReport& r) {
        return "<IndexReport " + r.kind + " " + std::to_string(r.raw.real()) + " -> " + std::to_string(r.integer) +
               ">";
      });

  py::class_<GapDescriptor>(m, "GapDescriptor")
      .def_readonly("epsilon", &GapDescriptor::epsilon)
      .def_readonly("width", &GapDescriptor::width);

  py::class_<RelativeGapResult>(m, "RelativeGapResult")
      .def_readonly("bulk", &RelativeGapResult::bulk)
      .def_readonly("edge", &RelativeGapResult::edge)
      .def_readonly("edge_two_term", &RelativeGapResult::edge_two_term)
      .def_readonly("gap", &RelativeGapResult::gap)
      .def_readonly("loop_defect", &RelativeGapResult::loop_defect)
      .def_property_readonly("effective_hamiltonian",
                             [](const RelativeGapResult& r) { return r.effective_hamiltonian.m; });

  m.def(
      "relative_gap_indices",
      [](const DriveProtocol& p, double eps, const RestrictionMap& map, double min_width, int samples,
         bool compute_edge) {
        RelativeConfig cfg;
        cfg.min_width = min_width;
        cfg.quadrature.samples_per_segment = samples;
        cfg.compute_edge = compute_edge;
        py::gil_scoped_release release;
        return relative_gap_indices(p, eps, map, cfg);
      },
      py::arg("protocol"), py::arg("epsilon"), py::arg("edge_map"), py::arg("min_width"), py::arg("samples") = 16,
      py::arg("compute_edge") = true);

  m.def(
      "run_config",
      [](const std::string& text) {
        const auto c = parse_config(text);
        py::gil_scoped_release release;
        return report_json(run_experiment(c), c);
      },
      py::arg("config_json"));
  m.def(
      "verify_config",
      [](const std::string& text, bool full) {
        const auto c = parse_config(text);
        py::gil_scoped_release release;
        return report_json(verify_suite(c, full), c);
      },
      py::arg("config_json"), py::arg("full") = false);
  m.def(
      "sweep_config",
      [](const std::string& text, const std::vector<int>& sizes) {
        const auto c = parse_config(text);
        py::gil_scoped_release release;
        return report_json(convergence_sweep(c, sizes), c);
      },
      py::arg("config_json"), py::arg("sizes"));
}
