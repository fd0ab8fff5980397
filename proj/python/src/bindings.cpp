#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cmath>

#include "spike/asymptotics.hpp"
#include "spike/errors.hpp"
#include "spike/io.hpp"
#include "spike/mesh.hpp"
#include "spike/moser.hpp"
#include "spike/radial_profile.hpp"
#include "spike/sweep.hpp"
#include "spike/symmetry.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace spike;

namespace {

Eigen::MatrixX2d node_array(const Mesh& m) {
  Eigen::MatrixX2d out(m.num_nodes(), 2);
  for (std::size_t i = 0; i < m.num_nodes(); ++i) out.row(i) = m.node(static_cast<int>(i)).transpose();
  return out;
}

Eigen::MatrixX3i triangle_array(const Mesh& m) {
  Eigen::MatrixX3i out(m.num_triangles(), 3);
  for (std::size_t t = 0; t < m.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) out(t, k) = m.triangles()[t][k];
  return out;
}

Domain make_domain(const std::string& name, double a, double b) {
  if (name == "disk") return Domain::unit_disk();
  if (name == "ellipse") return Domain::ellipse(a, b);
  throw Error(ErrorKind::InvalidParameter, "domain must be 'disk' or 'ellipse', got '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Boundary spike layers: limit profile, FEM ground states, asymptotics, Moser sequence.";

  static py::exception<Error> spike_error(m, "SpikeError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyObject* type = spike_error.ptr();
      py::object value = py::reinterpret_steal<py::object>(PyObject_CallFunction(type, "s", e.what()));
      value.attr("kind") = to_string(e.kind());
      value.attr("usage") = is_usage_error(e.kind());
      PyErr_SetObject(type, value.ptr());
    }
  });

  py::class_<RadialProfile>(m, "RadialProfile")
      .def_property_readonly("r", &RadialProfile::r)
      .def_property_readonly("w", &RadialProfile::w)
      .def_property_readonly("dw", &RadialProfile::dw)
      .def_property_readonly("amplitude", &RadialProfile::amplitude)
      .def_property_readonly("r_max", &RadialProfile::r_max)
      .def_readonly("theta", &RadialProfile::theta)
      .def("value", py::vectorize(&RadialProfile::value), py::arg("r"))
      .def("derivative", py::vectorize(&RadialProfile::derivative), py::arg("r"));

  m.def("shoot_ground_state", &shoot_ground_state, py::arg("tol_amplitude") = 1e-10, py::arg("r_max") = 25.0,
        py::arg("integrator_tol") = 1e-12, py::call_guard<py::gil_scoped_release>());
  m.def("energy_I", &energy_I);
  m.def("gamma_constant", &gamma_constant);
  m.def("decay_rate", &decay_rate, py::arg("profile"), py::arg("r_lo") = 10.0, py::arg("r_hi") = 15.0);
  m.def("pohozaev_checks", [](const RadialProfile& w) {
    PohozaevResiduals p = pohozaev_checks(w);
    return py::dict("gamma"_a = p.gamma, "residual_z1"_a = p.residual_z1, "residual_z2"_a = p.residual_z2,
                    "residual_energy"_a = p.residual_energy);
  });
  m.def("nehari_identity", [](const RadialProfile& w) {
    NehariIdentity n = nehari_identity(w);
    return py::dict("quadratic"_a = n.quadratic, "nonlinear"_a = n.nonlinear,
                    "relative_residual"_a = n.relative_residual);
  });

  py::class_<Mesh, std::shared_ptr<Mesh>>(m, "Mesh")
      .def_property_readonly("nodes", &node_array)
      .def_property_readonly("triangles", &triangle_array)
      .def_property_readonly("boundary", [](const Mesh& mesh) {
        std::vector<bool> b(mesh.boundary_flags().begin(), mesh.boundary_flags().end());
        return b;
      })
      .def("__len__", &Mesh::num_nodes);
  m.def(
      "disk_mesh", [](double h) { return std::make_shared<Mesh>(build_disk_mesh(1.0, h)); }, py::arg("h"));

  m.def(
      "solve",
      [](double d, double h, const std::string& domain, double a, double b, int max_iterations, double tolerance) {
        Domain dom = make_domain(domain, a, b);
        if (h <= 0) h = std::min(0.05, std::sqrt(d) / 6);
        SolveOptions o;
        o.max_iterations = max_iterations;
        o.tolerance = tolerance;
        SolveReport r;
        std::shared_ptr<const Mesh> mesh;
        {
          py::gil_scoped_release release;
          mesh = std::make_shared<const Mesh>(dom.kind() == Domain::Kind::UnitDisk ? build_disk_mesh(1.0, h)
                                                                                   : build_domain_mesh(dom, h));
          r = solve_ground_state(d, mesh, dom, o);
        }
        const Point& peak = mesh->node(r.peak_index);
        return py::dict("d"_a = r.d, "m_d"_a = r.m_d, "iterations"_a = r.iterations, "grad_norm"_a = r.grad_norm,
                        "converged"_a = r.converged, "peak"_a = peak, "peak_on_boundary"_a = r.peak_on_boundary,
                        "dist_to_boundary"_a = r.dist_to_boundary, "nodes"_a = node_array(*mesh),
                        "triangles"_a = triangle_array(*mesh), "u"_a = Eigen::VectorXd(r.u->values));
      },
      py::arg("d"), py::arg("h") = -1.0, py::arg("domain") = "disk", py::arg("a") = 1.0, py::arg("b") = 1.0,
      py::arg("max_iterations") = 5000, py::arg("tolerance") = 1e-8);

  m.def(
      "sweep",
      [](const std::vector<double>& d_list, const RadialProfile& w, double cells, int threads) {
        SweepOptions o;
        o.cells_per_sqrt_d = cells;
        o.threads = threads > 0 ? threads : worker_count();
        SweepResult s;
        {
          py::gil_scoped_release release;
          s = run_disk_sweep(d_list, w, o);
        }
        py::list rows;
        for (const SweepRow& r : s.rows)
          rows.append(py::dict("d"_a = r.d, "m_d"_a = r.m_d, "M_test"_a = r.M_test, "t0"_a = r.t0,
                               "peak_on_boundary"_a = r.peak_on_boundary,
                               "profile_sup_err"_a = r.concentration.profile_sup_err, "mu1"_a = r.concentration.mu1,
                               "budget"_a = r.budget));
        py::dict out("rows"_a = rows);
        if (s.expansion)
          out["expansion"] = py::dict("half_I"_a = s.expansion->half_I, "gamma"_a = s.expansion->gamma,
                                      "fitted_gamma_coeff"_a = s.expansion->fitted_gamma_coeff,
                                      "expected_coeff"_a = s.expansion->expected_coeff,
                                      "fitted_beta"_a = s.expansion->fitted_beta,
                                      "t0_loglog_slope"_a = s.expansion->t0_loglog_slope);
        return out;
      },
      py::arg("d_list"), py::arg("profile"), py::arg("cells_per_sqrt_d") = 16.0, py::arg("threads") = 0);

  m.def(
      "disk_symmetry",
      [](double d) {
        DiskSymmetryRun run;
        {
          py::gil_scoped_release release;
          run = disk_symmetry_run(d);
        }
        const SymmetryReport& s = run.symmetry;
        return py::dict("axis_angle"_a = s.axis_angle, "reflection_residual"_a = s.reflection_residual,
                        "angular_min"_a = s.angular_min, "vertical_min"_a = s.vertical_min,
                        "maxima_count"_a = s.maxima_count, "m_d"_a = run.solve.m_d);
      },
      py::arg("d"));

  m.def("moser_value", &moser_eval, py::arg("eps"), py::arg("delta"), py::arg("x"), py::arg("p") = Point(0, 0));
  m.def(
      "moser_sharpness",
      [](const std::vector<double>& alphas, const std::vector<double>& eps, double delta) {
        SharpnessTable t = sharpness_sweep(alphas, eps, delta);
        py::list rows;
        for (const SharpnessRow& r : t.rows)
          rows.append(py::dict("alpha"_a = r.alpha, "values"_a = r.values, "slope"_a = r.slope,
                               "r_squared"_a = r.r_squared, "ratio"_a = r.ratio,
                               "classification"_a = to_string(r.growth)));
        return rows;
      },
      py::arg("alphas"), py::arg("eps_list"), py::arg("delta") = 0.5);

  m.def(
      "write_profile", [](const RadialProfile& w, const std::filesystem::path& p) { io::write_profile(p, w); },
      py::arg("profile"), py::arg("path"));
  m.def(
      "read_profile", [](const std::filesystem::path& p) { return io::read_profile(p); }, py::arg("path"));
}
