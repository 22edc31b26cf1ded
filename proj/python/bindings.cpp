#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hankelkdv/certify.hpp"
#include "hankelkdv/dyson.hpp"
#include "hankelkdv/refsolver.hpp"

namespace py = pybind11;
using namespace hankelkdv;

namespace {

MiuraProfile profile_from_kwargs(const std::string& kind,
                                 const py::kwargs& kwargs) {
  std::map<std::string, double> params;
  for (auto item : kwargs)
    params[py::cast<std::string>(item.first)] = py::cast<double>(item.second);
  return MiuraProfile::catalog(kind, params);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "KdV solver for step-like singular Miura initial data via "
            "Hankel-operator determinants";

  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<numerical_error>(m, "NumericalError",
                                          PyExc_RuntimeError);

  py::class_<MiuraProfile>(m, "MiuraProfile")
      .def_static("catalog", &profile_from_kwargs, py::arg("kind"),
                  "Catalog profile: zero, delta(c), smooth_bump(a, amplitude), "
                  "positive_box(b, a), constant_r(kappa), "
                  "rough_random(seed, L, amplitude)")
      .def("r", &MiuraProfile::r, py::arg("x"))
      .def("evaluate_Q", &MiuraProfile::evaluate_Q, py::arg("x"))
      .def("mollify", &MiuraProfile::mollify, py::arg("n"))
      .def("is_zero", &MiuraProfile::is_zero)
      .def_property_readonly("id", &MiuraProfile::id)
      .def("__repr__",
           [](const MiuraProfile& p) { return "<MiuraProfile " + p.id() + ">"; });

  py::enum_<MMode>(m, "MMode")
      .value("exact_tail", MMode::exact_tail)
      .value("disk", MMode::disk);

  py::class_<MValue>(m, "MValue")
      .def_readonly("z", &MValue::z)
      .def_readonly("m", &MValue::m)
      .def_readonly("mode", &MValue::mode)
      .def_readonly("disk_radius_bound", &MValue::disk_radius_bound);

  m.def("m_function", &m_function, py::arg("profile"), py::arg("z"),
        py::arg("tol") = 1e-10,
        "Titchmarsh-Weyl m-function of the half-line problem on (-inf, 0)");

  m.def("reflection", &reflection, py::arg("profile"), py::arg("k"),
        py::arg("tol") = 1e-10,
        "Right reflection coefficient R(k) = (ik - m(k^2))/(ik + m(k^2))");

  m.def("xi", &xi, py::arg("k"), py::arg("z"), py::arg("t"),
        "Oscillatory factor exp{i(8 k^3 t + 2 k z)}");
  m.def("xi_abs", &xi_abs, py::arg("lam"), py::arg("h"), py::arg("z"),
        py::arg("t"), "Closed form of |xi| on the contour R + ih");

  m.def("norm_bound", &norm_bound, py::arg("z"), py::arg("t"), py::arg("h"),
        "Closed-form operator norm bound of the Hankel operator");
  m.def("optimize_h", &optimize_h, py::arg("z"), py::arg("t"),
        "Contour height minimizing the norm bound");

  py::class_<SolutionSample>(m, "SolutionSample")
      .def_readonly("x", &SolutionSample::x)
      .def_readonly("t", &SolutionSample::t)
      .def_readonly("q", &SolutionSample::q)
      .def_readonly("logdet", &SolutionSample::logdet)
      .def_readonly("norm_bound", &SolutionSample::norm_bound)
      .def_readonly("fd_error", &SolutionSample::fd_error)
      .def_readonly("n_nystrom", &SolutionSample::n_nystrom)
      .def_readonly("n_contour", &SolutionSample::n_contour)
      .def_readonly("h", &SolutionSample::h)
      .def_readonly("ok", &SolutionSample::ok)
      .def_readonly("error", &SolutionSample::error)
      .def("__repr__", [](const SolutionSample& s) {
        return "<SolutionSample x=" + std::to_string(s.x) +
               " t=" + std::to_string(s.t) + " q=" + std::to_string(s.q) + ">";
      });

  py::class_<SolveOptions>(m, "SolveOptions")
      .def(py::init<>())
      .def_readwrite("h", &SolveOptions::h)
      .def_readwrite("contour_nodes", &SolveOptions::contour_nodes)
      .def_readwrite("nystrom_nodes", &SolveOptions::nystrom_nodes)
      .def_readwrite("q_tol", &SolveOptions::q_tol)
      .def_readwrite("m_tol", &SolveOptions::m_tol)
      .def_readwrite("fd_check", &SolveOptions::fd_check)
      .def_readwrite("workers", &SolveOptions::workers);

  m.def("q_value", &q_value, py::arg("profile"), py::arg("x"), py::arg("t"),
        py::arg("opts") = SolveOptions{},
        "q(x, t) = -2 d^2/dx^2 log det(I + H(x,t))");
  m.def("q_grid", &q_grid, py::arg("profile"), py::arg("xs"), py::arg("t"),
        py::arg("opts") = SolveOptions{},
        "Batch q over an x grid sharing one reflection table");

  m.def(
      "singular_values",
      [](const MiuraProfile& p, double x, double t, double h, int n_contour,
         int n_nystrom) {
        LambdaRule rule = lambda_rule(t, h, n_contour);
        OscillatorySymbol sym{cxd(x, 0.0), t, h,
                              TableCache::instance().get_or_build(p, h, rule)};
        return singular_values(build_nystrom(sym, n_nystrom));
      },
      py::arg("profile"), py::arg("x"), py::arg("t"), py::arg("h") = 1.0,
      py::arg("contour_nodes") = 512, py::arg("nystrom_nodes") = 128,
      "Singular values of the assembled Hankel matrix");

  m.def(
      "kdv_residual",
      [](const MiuraProfile& p, double x, double t) {
        return kdv_residual(p, x, t);
      },
      py::arg("profile"), py::arg("x"), py::arg("t"),
      "|q_t - 6 q q_x + q_xxx| from tuned finite differences");

  py::class_<ParabolicDomain>(m, "ParabolicDomain")
      .def(py::init([](double delta, double t) {
             return ParabolicDomain{delta, t};
           }),
           py::arg("delta"), py::arg("t"))
      .def("contains", &ParabolicDomain::contains, py::arg("z"));

  m.def(
      "pole_free_margin",
      [](double t, double delta, cxd z) {
        PoleFreeReport rep = pole_free_certificate(MiuraProfile::delta(1.0), t,
                                                   delta, {z});
        return rep.samples[0].margin;
      },
      py::arg("t"), py::arg("delta"), py::arg("z"),
      "Contraction margin 1 - bound at z inside D(delta, t)");

  m.def("set_workers", &set_default_workers, py::arg("n"));
}
