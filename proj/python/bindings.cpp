#include "geopmp/builtin.hpp"
#include "geopmp/cli.hpp"
#include "geopmp/dirac.hpp"
#include "geopmp/expr.hpp"
#include "geopmp/lie.hpp"
#include "geopmp/pmp.hpp"
#include "geopmp/reconstruct.hpp"
#include "geopmp/reduction.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace geopmp;

namespace {

py::dict trajectory_dict(const Trajectory& traj)
{
  py::dict out;
  out["t"] = traj.times();
  for (const auto& b : traj.layout()) {
    Mat block(static_cast<Eigen::Index>(traj.size()), b.size);
    for (std::size_t i = 0; i < traj.size(); ++i) block.row(i) = traj.block(i, b.name).transpose();
    out[py::str(b.name)] = block;
  }
  py::dict channels;
  for (const auto& [name, values] : traj.channels()) channels[py::str(name)] = values;
  out["channels"] = channels;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Geometric PMP, Dirac structures and Lie-Poisson reduction";

  py::register_exception<Error>(m, "Error");
  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);

  py::class_<LieAlgebra>(m, "LieAlgebra")
      .def_static("heisenberg", &heisenberg_algebra)
      .def_static("abelian", &abelian_algebra, py::arg("dim"))
      .def_property_readonly("dim", &LieAlgebra::dim)
      .def("jacobi_defect", &LieAlgebra::jacobi_defect)
      .def("bracket", [](const LieAlgebra& a, const Vec& xi, const Vec& zeta) {
        return bracket(a, {xi}, {zeta}).coeffs;
      })
      .def("coadjoint", [](const LieAlgebra& a, const Vec& xi, const Vec& lambda) {
        return coadjoint(a, {xi}, {lambda}).coeffs;
      })
      .def("exp", [](const LieAlgebra& a, const Vec& xi) { return exp_nilpotent(a, {xi}).matrix; });

  m.def("integrate_pmp_heisenberg",
        [](const Vec& x0, const Vec& p0, double T, double step) {
          PmpConfig cfg;
          cfg.rk_step = step;
          return trajectory_dict(integrate_pmp(heisenberg_problem(), x0, p0, T, cfg));
        },
        py::arg("x0"), py::arg("p0"), py::arg("T"), py::arg("step") = 1e-3);

  m.def("integrate_reduced_heisenberg",
        [](const Vec& lambda0, double T, double step) {
          ReducedConfig cfg;
          cfg.rk_step = step;
          ReducedState st{Vec(0), Vec(0), {lambda0}, Vec::Zero(2)};
          return trajectory_dict(integrate_reduced(heisenberg_reduced_problem(), st, T, cfg));
        },
        py::arg("lambda0"), py::arg("T"), py::arg("step") = 1e-3);

  m.def("body_momentum_heisenberg", [](const Vec& x, const Vec& p) {
    return project_full_to_reduced(heisenberg_problem(), {x, p, Vec::Zero(2)}).mu.coeffs;
  });

  m.def("geodesic_oracle",
        [](double theta, double k, double T, double step) {
          return trajectory_dict(heisenberg_geodesic_oracle(theta, k, T, step));
        },
        py::arg("theta"), py::arg("k"), py::arg("T"), py::arg("step") = 1e-3);

  m.def("geodesic_report",
        [](double theta, double k, double T, double step, double tol) {
          const GeodesicReport rep = heisenberg_geodesic_report(theta, k, T, step, tol);
          py::dict out;
          py::list printed;
          for (const auto& c : rep.printed) {
            py::dict d;
            d["component"] = c.name;
            d["formula"] = c.formula;
            d["max_deviation"] = c.max_deviation;
            d["matches"] = c.matches;
            printed.append(d);
          }
          out["printed"] = printed;
          out["radial_deviation"] = rep.radial_deviation;
          out["exact_deviation"] = rep.exact_deviation;
          out["consistent"] = rep.consistent;
          return out;
        },
        py::arg("theta"), py::arg("k"), py::arg("T"), py::arg("step") = 1e-3,
        py::arg("tol") = 1e-5);

  m.def("graph_is_dirac", [](const Mat& omega) { return is_dirac(graph_of_two_form(TwoForm(omega))); });
  m.def("reduced_fiber_is_dirac", [](const Vec& lambda) {
    return is_dirac(reduced_dirac_fiber(heisenberg_algebra(), {lambda}));
  });

  m.def("evaluate_expression",
        [](const std::string& src, const std::map<std::string, double>& bindings) {
          std::vector<std::string> names;
          for (const auto& kv : bindings) names.push_back(kv.first);
          return expr::parse(src, names).evaluate(bindings);
        },
        py::arg("source"), py::arg("bindings"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
