#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bclab/analysis.hpp"
#include "bclab/boundary_control.hpp"
#include "bclab/free_dynamics.hpp"
#include "bclab/green_system.hpp"
#include "bclab/numerics.hpp"

namespace py = pybind11;
using namespace bclab;

namespace {

BumpShape shape_from_string(const std::string& s) {
  if (s == "sin2") return BumpShape::sin2;
  if (s == "sin4") return BumpShape::sin4;
  throw InvalidArgument("bump shape must be 'sin2' or 'sin4'");
}

OperatorSpec spec_from_name(const std::string& name) {
  if (name == "minimal") return OperatorSpec::minimal();
  if (name == "whole_line_selfadjoint") {
    return OperatorSpec::whole_line_selfadjoint();
  }
  if (name == "polarized_part") return OperatorSpec::polarized_part();
  if (name == "polarized_mirror") return OperatorSpec::polarized_mirror();
  throw InvalidArgument("unknown operator spec '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_bclab, m) {
  m.doc() =
      "boundary-controlled evolution laboratory: grids, symmetric systems, "
      "free and controlled dynamics";

  py::register_exception<InvalidArgument>(m, "InvalidArgument",
                                          PyExc_ValueError);

  py::class_<Grid>(m, "Grid")
      .def(py::init(&Grid::uniform), py::arg("n"), py::arg("length"))
      .def_readonly("n", &Grid::n)
      .def_readonly("length", &Grid::length)
      .def_readonly("h", &Grid::h)
      .def_readonly("nodes", &Grid::nodes)
      .def_readonly("weights", &Grid::weights);

  py::class_<DiscreteGreenSystem>(m, "DiscreteGreenSystem")
      .def_readonly("grid", &DiscreteGreenSystem::grid)
      .def_readonly("op", &DiscreteGreenSystem::op)
      .def_readonly("state_weights", &DiscreteGreenSystem::state_weights)
      .def_property_readonly("state_dim", &DiscreteGreenSystem::state_dim)
      .def("gamma1", &DiscreteGreenSystem::gamma1, py::arg("u"))
      .def("gamma2", &DiscreteGreenSystem::gamma2, py::arg("u"));

  m.def(
      "build_dirac",
      [](const Grid& grid, double potential_scalar) {
        return build_dirac(grid, Potential::scalar(potential_scalar));
      },
      py::arg("grid"), py::arg("potential_scalar") = 0.0);

  m.def("green_residual", &green_residual, py::arg("system"), py::arg("u"),
        py::arg("v"));

  py::class_<SelfAdjointExtension>(m, "SelfAdjointExtension")
      .def_property_readonly(
          "eigenvalues",
          [](const SelfAdjointExtension& ext) {
            return ext.spectrum.eigenvalues;
          })
      .def("restrict_state", &SelfAdjointExtension::restrict_state,
           py::arg("u"))
      .def("prolong_state", &SelfAdjointExtension::prolong_state,
           py::arg("u"))
      .def("is_constrained", &SelfAdjointExtension::is_constrained,
           py::arg("u"), py::arg("tol") = 1e-10);

  m.def("extend_self_adjoint", &extend_self_adjoint, py::arg("system"));

  m.def("propagate", &propagate, py::arg("extension"), py::arg("state"),
        py::arg("t0"), py::arg("t"));

  py::class_<ControlSignal>(m, "ControlSignal")
      .def(py::init([](const std::string& shape, double t_start, double t_end,
                       double amplitude) {
             if (!(t_end > t_start)) {
               throw InvalidArgument("control signal needs t_end > t_start");
             }
             ControlSignal f;
             f.shape = shape_from_string(shape);
             f.t_start = t_start;
             f.t_end = t_end;
             f.amplitude = amplitude;
             return f;
           }),
           py::arg("shape"), py::arg("t_start"), py::arg("t_end"),
           py::arg("amplitude") = 1.0)
      .def("value", &ControlSignal::value, py::arg("t"))
      .def("derivative", &ControlSignal::derivative, py::arg("t"));

  m.def(
      "solve_bc_direct",
      [](const DiscreteGreenSystem& sys, const ControlSignal& f,
         double t_final, double dt) {
        return solve_bc_direct(sys, f, t_final, dt).at_final();
      },
      py::arg("system"), py::arg("control"), py::arg("t_final"),
      py::arg("dt") = 0.0);

  m.def("transport_oracle", &transport_oracle, py::arg("grid"),
        py::arg("control"), py::arg("t"));

  m.def(
      "deficiency_indices",
      [](const std::string& name) {
        const DeficiencyIndices d = deficiency_indices(spec_from_name(name));
        return std::make_pair(d.n_plus, d.n_minus);
      },
      py::arg("spec_name"),
      "square-integrable mode counts (n_plus, n_minus) for a named "
      "half-line operator");
}
