#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "surfns/runner.hpp"

namespace py = pybind11;
using namespace surfns;

namespace {

py::tuple csr_arrays(const SpMat& m) {
  const int rows = static_cast<int>(m.rows());
  const int nnz = static_cast<int>(m.nonZeros());
  py::array_t<int> indptr(rows + 1);
  py::array_t<int> indices(nnz);
  py::array_t<double> values(nnz);
  std::copy(m.outerIndexPtr(), m.outerIndexPtr() + rows + 1, indptr.mutable_data());
  std::copy(m.innerIndexPtr(), m.innerIndexPtr() + nnz, indices.mutable_data());
  std::copy(m.valuePtr(), m.valuePtr() + nnz, values.mutable_data());
  return py::make_tuple(indptr, indices, values,
                        py::make_tuple(m.rows(), m.cols()));
}

ProblemSpec problem_by_name(const std::string& name) {
  for (ProblemSpec& ps : builtin_problems()) {
    if (ps.name == name) return ps;
  }
  throw Error("unknown problem: " + name);
}

}  // namespace

PYBIND11_MODULE(_surfns, m) {
  m.doc() = "Surface Navier-Stokes finite elements on closed surfaces";

  py::register_exception<Error>(m, "SurfnsError");

  py::class_<Surface>(m, "Surface")
      .def_static("sphere", &Surface::sphere, py::arg("radius") = 1.0)
      .def_static("varying_curvature", &Surface::varying_curvature)
      .def("closest_point", &Surface::closest_point)
      .def("signed_distance", &Surface::signed_distance)
      .def("normal", &Surface::normal)
      .def("weingarten", &Surface::weingarten)
      .def("level_set_value", &Surface::level_set_value)
      .def("map_from_unit_sphere", &Surface::map_from_unit_sphere);

  py::class_<MeshTopology>(m, "MeshTopology")
      .def_property_readonly("vertex_count", &MeshTopology::vertex_count)
      .def_property_readonly("edge_count", &MeshTopology::edge_count)
      .def_property_readonly("face_count", &MeshTopology::face_count)
      .def_property_readonly("euler_characteristic", &MeshTopology::euler_characteristic)
      .def_property_readonly("vertices", [](const MeshTopology& t) {
        py::array_t<double> out({t.vertex_count(), 3});
        auto r = out.mutable_unchecked<2>();
        for (int i = 0; i < t.vertex_count(); ++i) {
          for (int j = 0; j < 3; ++j) r(i, j) = t.vertices[i][j];
        }
        return out;
      });

  py::class_<HighOrderMesh>(m, "HighOrderMesh")
      .def_readonly("geometric_degree", &HighOrderMesh::geometric_degree)
      .def_readonly("h", &HighOrderMesh::h)
      .def_readonly("sigma", &HighOrderMesh::sigma)
      .def_property_readonly("element_count", &HighOrderMesh::element_count)
      .def_property_readonly("node_count",
                             [](const HighOrderMesh& m_) { return m_.numbering.count; });

  m.def("build_base_mesh", &build_base_mesh, py::arg("surface"), py::arg("refinements"));
  m.def("elevate_geometry", &elevate_geometry, py::arg("surface"), py::arg("base"),
        py::arg("kg"));

  m.def("quadrature", [](int degree) {
    const QuadratureRule rule = quadrature(degree);
    py::array_t<double> pts({rule.size(), 2});
    py::array_t<double> wts(rule.size());
    auto rp = pts.mutable_unchecked<2>();
    for (int i = 0; i < rule.size(); ++i) {
      rp(i, 0) = rule.points[i][0];
      rp(i, 1) = rule.points[i][1];
    }
    std::copy(rule.weights.begin(), rule.weights.end(), wts.mutable_data());
    return py::make_tuple(pts, wts);
  });

  py::class_<FESpace, std::shared_ptr<FESpace>>(m, "FESpace")
      .def_property_readonly("dof_count", &FESpace::dof_count)
      .def_property_readonly("degree", &FESpace::degree)
      .def_property_readonly("components", &FESpace::components);

  py::class_<THSpaces>(m, "THSpaces")
      .def_readonly("velocity", &THSpaces::velocity)
      .def_readonly("pressure", &THSpaces::pressure)
      .def_readonly("lam", &THSpaces::lambda);

  m.def("build_taylor_hood", &build_taylor_hood, py::arg("mesh"), py::arg("ku"),
        py::arg("klambda"), py::keep_alive<0, 1>());

  m.def("assemble_mass",
        [](const FESpace& s) { return csr_arrays(assemble_mass(s)); });
  m.def("assemble_a_h",
        [](const FESpace& s) { return csr_arrays(assemble_a_h(s)); });
  m.def("assemble_constraints", [](const FESpace& u, const FESpace& p, const FESpace& l) {
    const ConstraintBlocks cb = assemble_b_L(u, p, l);
    return py::make_tuple(csr_arrays(cb.Bp), csr_arrays(cb.Bl), VecX(cb.mean));
  });

  m.def("problem_names", [] {
    std::vector<std::string> names;
    for (const ProblemSpec& ps : builtin_problems()) names.push_back(ps.name);
    return names;
  });
  m.def("forcing", [](const std::string& problem, const Vec3& x, double t) {
    return forcing(problem_by_name(problem), x, t);
  });
  m.def("exact_velocity", [](const std::string& problem, const Vec3& x, double t) {
    const ProblemSpec ps = problem_by_name(problem);
    return ps.velocity(ps.surface.closest_point(x), t);
  });

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("surface", &RunConfig::surface)
      .def_readwrite("ku", &RunConfig::ku)
      .def_readwrite("kpr", &RunConfig::kpr)
      .def_readwrite("klambda", &RunConfig::klambda)
      .def_readwrite("kg", &RunConfig::kg)
      .def_readwrite("base_refine", &RunConfig::base_refine)
      .def_readwrite("levels", &RunConfig::levels)
      .def_readwrite("dt0", &RunConfig::dt0)
      .def_readwrite("t_end", &RunConfig::t_end)
      .def_readwrite("mu", &RunConfig::mu)
      .def_readwrite("tau_alpha", &RunConfig::tau_alpha)
      .def_readwrite("formulation", &RunConfig::formulation)
      .def_readwrite("inertia", &RunConfig::inertia)
      .def_readwrite("initial_condition", &RunConfig::initial_condition)
      .def_readwrite("forcing_mode", &RunConfig::forcing_mode)
      .def_readwrite("normal_mode", &RunConfig::normal_mode)
      .def_readwrite("problem", &RunConfig::problem)
      .def_readwrite("quad_degree", &RunConfig::quad_degree)
      .def_readwrite("threads", &RunConfig::threads)
      .def_readwrite("seed", &RunConfig::seed);

  py::class_<ErrorReport>(m, "ErrorReport")
      .def_readonly("h", &ErrorReport::h)
      .def_readonly("dt", &ErrorReport::dt)
      .def_readonly("ndof_u", &ErrorReport::ndof_u)
      .def_readonly("ndof_p", &ErrorReport::ndof_p)
      .def_readonly("ndof_lambda", &ErrorReport::ndof_lambda)
      .def_readonly("err_u_linf_l2", &ErrorReport::err_u_linf_l2)
      .def_readonly("err_pu_linf_l2", &ErrorReport::err_pu_linf_l2)
      .def_readonly("err_n_linf_l2", &ErrorReport::err_n_linf_l2)
      .def_readonly("err_grad_l2l2", &ErrorReport::err_grad_l2l2)
      .def_readonly("err_p_l2l2", &ErrorReport::err_p_l2l2)
      .def_readonly("err_lambda_l2l2", &ErrorReport::err_lambda_l2l2);

  py::class_<LevelRun>(m, "LevelRun")
      .def_readonly("refinements", &LevelRun::refinements)
      .def_readonly("report", &LevelRun::report)
      .def_readonly("max_constraint_residual", &LevelRun::max_constraint_residual)
      .def_readonly("max_pressure_mean", &LevelRun::max_pressure_mean)
      .def_readonly("max_linear_residual", &LevelRun::max_linear_residual);

  m.def("run_convergence_study", &run_convergence_study, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def("eoc", &eoc, py::arg("errors"), py::arg("hs"));

  m.def("geometric_errors", [](const RunConfig& cfg) {
    py::list out;
    for (const GeomLevel& g : run_geomcheck(cfg)) {
      out.append(py::make_tuple(g.refinements, g.h, g.errors.max_distance,
                                g.errors.max_normal_error, g.errors.max_weingarten_error));
    }
    return out;
  });

  m.def("infsup_constants", [](const RunConfig& cfg) {
    py::list out;
    for (const InfSupLevel& l : run_infsup(cfg)) {
      out.append(py::make_tuple(l.refinements, l.h, l.betas.beta_l2, l.betas.beta_h1));
    }
    return out;
  });
}
