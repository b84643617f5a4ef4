#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qot/classical.hpp"
#include "qot/cost_model.hpp"
#include "qot/error.hpp"
#include "qot/lab.hpp"
#include "qot/metrics.hpp"
#include "qot/qubit.hpp"
#include "qot/transport.hpp"

namespace py = pybind11;
using namespace qot;

namespace {

py::dict solution_dict(const TransportSolution& s) {
  py::dict d;
  d["value"] = s.value;
  d["joint"] = s.joint;
  d["dual_a"] = s.dual_a;
  d["dual_b"] = s.dual_b;
  d["dual_bound"] = s.dual_bound;
  d["gap"] = s.gap;
  d["marginal_residual"] = s.marginal_residual;
  d["iterations"] = s.iterations;
  d["converged"] = s.converged;
  d["method"] = s.method;
  return d;
}

std::string run_scan(const std::string& name, const lab::ScanConfig& config) {
  py::gil_scoped_release release;
  lab::ScanReport r;
  if (name == "triangle") r = lab::scan_triangle(config);
  else if (name == "bounds") r = lab::scan_bounds(config);
  else if (name == "supermult") r = lab::scan_supermult(config);
  else if (name == "decoherence") r = lab::scan_decoherence(config);
  else throw Error(ErrorKind::InvalidArgument, "unknown scan '" + name + "'");
  return lab::to_json(r).dump();
}

}  // namespace

PYBIND11_MODULE(_qot, m) {
  m.doc() = "Quantum optimal transport with the swap-symmetric cost.";

  static py::exception<Error> error(m, "QotError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (message, kind)
      PyErr_SetObject(error.ptr(), py::make_tuple(e.what(), std::string(to_string(e.kind()))).ptr());
    }
  });

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init(&validate_state), py::arg("matrix"))
      .def_property_readonly("dim", &DensityMatrix::dim)
      .def_property_readonly("matrix", &DensityMatrix::matrix)
      .def("__repr__", [](const DensityMatrix& r) { return "DensityMatrix(dim=" + std::to_string(r.dim()) + ")"; });
  py::implicitly_convertible<CMatrix, DensityMatrix>();

  m.def("maximally_mixed", &maximally_mixed, py::arg("n"));
  m.def("qubit_state", &qubit_state, py::arg("x"), py::arg("y"), py::arg("z"));
  m.def("diagonal_state", &diagonal_state, py::arg("probabilities"));
  m.def("random_density", &random_density, py::arg("n"), py::arg("seed"));
  m.def("random_pure", &random_pure, py::arg("n"), py::arg("seed"));
  m.def("is_pure", &is_pure, py::arg("rho"), py::arg("tol") = 1e-10);

  m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));
  m.def("trace_distance", &trace_distance, py::arg("a"), py::arg("b"));
  m.def("bures_distance", &bures_distance, py::arg("a"), py::arg("b"));
  m.def("root_infidelity", &root_infidelity, py::arg("a"), py::arg("b"));

  m.def("simplex_cost", [](int n) { return simplex_cost(n).matrix; }, py::arg("n"));
  m.def(
      "geometry_cost",
      [](const RMatrix& distances, double power) {
        return cost_power(quantize_geometry(ClassicalGeometry(distances)), power).matrix;
      },
      py::arg("distances"), py::arg("power") = 1.0);

  m.def(
      "solve",
      [](const DensityMatrix& a, const DensityMatrix& b, const CMatrix& cost) {
        TransportSolution s;
        {
          py::gil_scoped_release release;
          s = solve(CouplingProblem(a, b, cost));
        }
        return solution_dict(s);
      },
      py::arg("a"), py::arg("b"), py::arg("cost"));
  m.def(
      "transport_cost", [](const DensityMatrix& a, const DensityMatrix& b, const CMatrix& cost) {
        return transport_cost(a, b, cost);
      },
      py::arg("a"), py::arg("b"), py::arg("cost"));
  m.def("swap_fidelity", [](const DensityMatrix& a, const DensityMatrix& b) { return swap_fidelity(a, b); },
        py::arg("a"), py::arg("b"));

  m.def(
      "qubit_cost",
      [](const DensityMatrix& a, const DensityMatrix& b) {
        const auto r = qubit::cost_exact(qubit::canonicalize(a, b));
        return py::make_tuple(r.value, std::string(qubit::to_string(r.branch)));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "classical_cost",
      [](const std::vector<double>& p, const std::vector<double>& q, const RMatrix& distances, double order) {
        return classical_cost(ProbabilityVector(p), ProbabilityVector(q), ClassicalGeometry(distances), order);
      },
      py::arg("p"), py::arg("q"), py::arg("distances"), py::arg("order") = 1.0);

  m.def(
      "_scan",
      [](const std::string& name, int dim, double order, double exponent, const std::string& geometry, int samples,
         std::uint64_t seed, int threads, const std::string& measure, double tolerance, bool expect_violation) {
        lab::ScanConfig c;
        c.dim = dim;
        c.order = order;
        c.exponent = exponent;
        c.geometry = geometry;
        c.samples = samples;
        c.seed = seed;
        c.threads = threads;
        c.measure = lab::measure_from_string(measure);
        c.tolerance = tolerance;
        c.expect_violation = expect_violation;
        return run_scan(name, c);
      },
      py::arg("name"), py::arg("dim"), py::arg("order"), py::arg("exponent"), py::arg("geometry"),
      py::arg("samples"), py::arg("seed"), py::arg("threads"), py::arg("measure"), py::arg("tolerance"),
      py::arg("expect_violation"));
}
