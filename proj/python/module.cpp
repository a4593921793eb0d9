#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bsheat/assembly.hpp"
#include "bsheat/disk_oracle.hpp"
#include "bsheat/evolution.hpp"
#include "bsheat/linsolve.hpp"
#include "bsheat/mesh.hpp"
#include "bsheat/resolvent.hpp"

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace bsheat;

PYBIND11_MODULE(bsheat, m) {
  m.doc() = "coupled bulk-surface heat flow: meshes, operators, spectra, oracles";

  py::register_exception<MeshError>(m, "MeshError");
  py::register_exception<AssemblyError>(m, "AssemblyError");
  py::register_exception<SingularSystemError>(m, "SingularSystemError");
  py::register_exception<StepSizeError>(m, "StepSizeError");
  py::register_exception<oracle::RadialSingularError>(m, "RadialSingularError");

  py::class_<Mesh>(m, "Mesh")
      .def_readonly("nodes", &Mesh::nodes)
      .def_readonly("triangles", &Mesh::triangles)
      .def_readonly("boundary_loop", &Mesh::boundary_loop)
      .def_property_readonly("num_nodes", &Mesh::num_nodes)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("num_boundary_nodes", &Mesh::num_boundary_nodes)
      .def("triangle_area", &Mesh::triangle_area, py::arg("t"))
      .def("total_area", &Mesh::total_area)
      .def("longest_edge", &Mesh::longest_edge)
      .def("validate", &Mesh::validate)
      .def("__repr__", [](const Mesh& mesh) {
        std::ostringstream s;
        s << "Mesh(V=" << mesh.num_nodes() << ", F=" << mesh.num_triangles()
          << ", m=" << mesh.num_boundary_nodes() << ")";
        return s.str();
      });

  py::class_<TraceMap>(m, "TraceMap")
      .def_readonly("position_in_loop", &TraceMap::position_in_loop)
      .def_readonly("arc_weights", &TraceMap::arc_weights)
      .def("total_arc_length", &TraceMap::total_arc_length)
      .def("is_boundary", &TraceMap::is_boundary, py::arg("node"))
      .def("boundary_index_of", &TraceMap::boundary_index_of, py::arg("node"));

  m.def("build_disk_mesh", &build_disk_mesh, py::arg("rings"));
  m.def("load_mesh_file", &load_mesh_file, py::arg("path"));
  m.def(
      "load_mesh_text",
      [](const std::string& text) {
        std::istringstream in(text);
        return load_mesh_text(in);
      },
      py::arg("text"));
  m.def(
      "save_mesh_file",
      [](const Mesh& mesh, const std::string& path) {
        std::ofstream out(path);
        if (!out) throw std::invalid_argument("cannot open '" + path + "' for writing");
        save_mesh_text(mesh, out);
      },
      py::arg("mesh"), py::arg("path"));
  m.def(
      "save_mesh_text",
      [](const Mesh& mesh) {
        std::ostringstream out;
        save_mesh_text(mesh, out);
        return out.str();
      },
      py::arg("mesh"));
  m.def("trace_map", &trace_map, py::arg("mesh"));

  py::class_<Pencil>(m, "Pencil")
      .def_readonly("A_mass", &Pencil::A_mass)
      .def_readonly("B_stiff", &Pencil::B_stiff)
      .def_readonly("k", &Pencil::k)
      .def_readonly("l", &Pencil::l)
      .def_readonly("boundary_loop", &Pencil::boundary_loop)
      .def("dim", &Pencil::dim);

  py::class_<GramSet>(m, "GramSet")
      .def_readonly("G_H", &GramSet::G_H)
      .def_readonly("G_H1Omega", &GramSet::G_H1Omega)
      .def_readonly("G_H1Gamma", &GramSet::G_H1Gamma);

  m.def("assemble_bulk", &assemble_bulk, py::arg("mesh"));
  m.def("assemble_boundary", &assemble_boundary, py::arg("mesh"), py::arg("trace"));
  m.def("boundary_loop_matrices", &boundary_loop_matrices, py::arg("mesh"), py::arg("trace"));
  m.def("build_pencil", &build_pencil, py::arg("mesh"), py::arg("trace"), py::arg("k"),
        py::arg("l"));
  m.def("gram_set", &gram_set, py::arg("mesh"), py::arg("trace"));
  m.def("dtn_matrix", &dtn_matrix, py::arg("mesh"), py::arg("trace"));
  m.def("auxiliary_boundary_matrix", &auxiliary_boundary_matrix, py::arg("mesh"), py::arg("trace"),
        py::arg("l_tilde"), py::arg("k_tilde"), py::arg("Lambda"));

  py::class_<SpectrumReport>(m, "SpectrumReport")
      .def_readonly("eigenvalues", &SpectrumReport::eigenvalues)
      .def_readonly("residuals", &SpectrumReport::residuals)
      .def_readonly("eigenvectors", &SpectrumReport::eigenvectors)
      .def_readonly("infinite_count", &SpectrumReport::infinite_count)
      .def_readonly("k", &SpectrumReport::k)
      .def_readonly("l", &SpectrumReport::l)
      .def_readonly("h", &SpectrumReport::h)
      .def("sigma_max", &SpectrumReport::sigma_max);

  m.def(
      "solve_sparse",
      [](const SpMat& M, const Eigen::VectorXd& rhs) { return solve_sparse(M, rhs); },
      py::arg("M"), py::arg("rhs"));
  m.def(
      "generalized_eigs",
      [](const SpMat& B, const SpMat& A, int cutoff) { return generalized_eigs(B, A, cutoff); },
      py::arg("B"), py::arg("A"), py::arg("dense_cutoff") = 3000);
  m.def(
      "pencil_spectrum",
      [](const Pencil& pencil, double mesh_h, int cutoff) {
        return generalized_eigs(pencil, mesh_h, cutoff);
      },
      py::arg("pencil"), py::arg("mesh_h"), py::arg("dense_cutoff") = 3000);

  py::class_<ConstantsReport>(m, "ConstantsReport")
      .def_readonly("k", &ConstantsReport::k)
      .def_readonly("l", &ConstantsReport::l)
      .def_readonly("c8", &ConstantsReport::c8)
      .def_readonly("c6", &ConstantsReport::c6)
      .def_readonly("delta0", &ConstantsReport::delta0)
      .def_readonly("lambda0", &ConstantsReport::lambda0)
      .def_readonly("c5", &ConstantsReport::c5)
      .def_readonly("epsilon", &ConstantsReport::epsilon);

  m.def("constants_report", &constants_report, py::arg("k"), py::arg("l"), py::arg("c8") = 1.0);

  py::class_<EllipticSolution>(m, "EllipticSolution")
      .def_readonly("u", &EllipticSolution::u)
      .def_readonly("lambda_", &EllipticSolution::lambda)
      .def_readonly("residual_bulk", &EllipticSolution::residual_bulk)
      .def_readonly("residual_boundary", &EllipticSolution::residual_boundary);

  m.def(
      "solve_resolvent",
      [](const Pencil& pencil, std::complex<double> lambda, const Eigen::VectorXcd& h) {
        return solve_resolvent(pencil, lambda, h);
      },
      py::arg("pencil"), py::arg("lambda_"), py::arg("h"));

  py::class_<BoundaryField>(m, "BoundaryField")
      .def(py::init<>())
      .def_readwrite("laplacian", &BoundaryField::laplacian)
      .def_readwrite("normal_derivative", &BoundaryField::normal_derivative)
      .def_readwrite("surface_laplacian", &BoundaryField::surface_laplacian);

  m.def("compatibility_residual", &compatibility_residual, py::arg("field"), py::arg("k"),
        py::arg("l"), py::arg("mesh"));

  py::class_<TimeSeries>(m, "TimeSeries")
      .def_readonly("times", &TimeSeries::times)
      .def_readonly("norm_H", &TimeSeries::norm_H)
      .def_readonly("norm_H1_omega", &TimeSeries::norm_H1_omega)
      .def_readonly("conserved", &TimeSeries::conserved)
      .def_readonly("snapshot_steps", &TimeSeries::snapshot_steps)
      .def_readonly("snapshots", &TimeSeries::snapshots);

  m.def("theta_step", &theta_step, py::arg("pencil"), py::arg("u"), py::arg("tau"),
        py::arg("theta"));
  m.def("evolve", &evolve, py::arg("pencil"), py::arg("u0"), py::arg("tau"), py::arg("T"),
        py::arg("theta"), py::arg("grams"), py::arg("snapshot_stride") = 0);
  m.def("make_initial_state", &make_initial_state, py::arg("mesh"), py::arg("kind"),
        py::arg("mode_n") = 1);

  py::class_<LLimitRow>(m, "LLimitRow")
      .def_readonly("l", &LLimitRow::l)
      .def_readonly("peak_norm_H1", &LLimitRow::peak_norm_H1)
      .def_readonly("predicted_sigma_max", &LLimitRow::predicted_sigma_max);

  m.def("l_limit_experiment", &l_limit_experiment, py::arg("mesh"), py::arg("k"),
        py::arg("l_list"), py::arg("u0"), py::arg("tau"), py::arg("T"), py::arg("theta") = 1.0);
  m.def("step_operator_norm_estimate", &step_operator_norm_estimate, py::arg("pencil"),
        py::arg("grams"), py::arg("tau"), py::arg("theta"), py::arg("iterations") = 300);

  m.def("bessel_in", &oracle::bessel_in, py::arg("n"), py::arg("x"));
  m.def("bessel_in_prime", &oracle::bessel_in_prime, py::arg("n"), py::arg("x"));
  m.def("bessel_jn", &oracle::bessel_jn, py::arg("n"), py::arg("x"));
  m.def("bessel_jn_prime", &oracle::bessel_jn_prime, py::arg("n"), py::arg("x"));

  py::class_<oracle::DispersionRoot>(m, "DispersionRoot")
      .def_readonly("n", &oracle::DispersionRoot::n)
      .def_readonly("sigma", &oracle::DispersionRoot::sigma)
      .def_readonly("mu", &oracle::DispersionRoot::mu)
      .def_readonly("branch", &oracle::DispersionRoot::branch)
      .def_readonly("bracket_lo", &oracle::DispersionRoot::bracket_lo)
      .def_readonly("bracket_hi", &oracle::DispersionRoot::bracket_hi)
      .def_readonly("residual", &oracle::DispersionRoot::residual)
      .def("__repr__", [](const oracle::DispersionRoot& r) {
        std::ostringstream s;
        s << "DispersionRoot(n=" << r.n << ", sigma=" << r.sigma << ", branch=" << r.branch << ")";
        return s.str();
      });

  m.def("dispersion_roots", &oracle::dispersion_roots, py::arg("k"), py::arg("l"),
        py::arg("n_max"), py::arg("mu_max") = 30.0);

  py::class_<oracle::RadialSolution>(m, "RadialSolution")
      .def_readonly("grid", &oracle::RadialSolution::grid)
      .def_readonly("values", &oracle::RadialSolution::values)
      .def_readonly("n", &oracle::RadialSolution::n)
      .def_readonly("lambda_", &oracle::RadialSolution::lambda)
      .def_readonly("residual", &oracle::RadialSolution::residual);

  m.def(
      "radial_resolvent_fd",
      [](int n, double lambda, double k, double l, const Eigen::VectorXd& samples) {
        return oracle::radial_resolvent_fd(n, lambda, k, l, samples);
      },
      py::arg("n"), py::arg("lambda_"), py::arg("k"), py::arg("l"), py::arg("H_samples"));
  m.def("modal_reference", &oracle::modal_reference, py::arg("root"), py::arg("t"),
        py::arg("points"));
}
