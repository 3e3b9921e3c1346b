/*
 * Python bindings for the main operations: configuration, the determinant
 * symbol, resolvent application (explicit formulas and the 2D oracle), norm
 * sweeps, and semigroup evolution.  Grid data crosses the boundary as
 * complex128 arrays of shape (n_long, n_transversal) per habitat.
 */

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "semiperm/complex_geometry.hpp"
#include "semiperm/direct2d.hpp"
#include "semiperm/operator_core.hpp"
#include "semiperm/runconfig.hpp"
#include "semiperm/suites.hpp"
#include "semiperm/sweep.hpp"
#include "semiperm/transmission.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace semiperm;
using cd = std::complex<double>;

namespace {

grid::GridFunction make_grid(const grid::HabitatConfig& cfg,
                             const Eigen::MatrixXcd& minus,
                             const Eigen::MatrixXcd& plus) {
  grid::GridFunction f;
  f.minus = minus;
  f.plus = plus;
  f.check_shape(cfg);
  return f;
}

}  // namespace

PYBIND11_MODULE(semiperm, m) {
  m.doc() = "two-habitat transmission operator: explicit resolvent, sector "
            "sweeps, semigroup evolution";

  py::class_<grid::HabitatConfig>(m, "HabitatConfig")
      .def(py::init<>())
      .def_readwrite("ell", &grid::HabitatConfig::ell)
      .def_readwrite("L", &grid::HabitatConfig::L)
      .def_readwrite("d_minus", &grid::HabitatConfig::d_minus)
      .def_readwrite("d_plus", &grid::HabitatConfig::d_plus)
      .def_readwrite("r_minus", &grid::HabitatConfig::r_minus)
      .def_readwrite("r_plus", &grid::HabitatConfig::r_plus)
      .def_readwrite("q", &grid::HabitatConfig::q)
      .def_readwrite("n_transversal", &grid::HabitatConfig::n_transversal)
      .def_readwrite("n_long_minus", &grid::HabitatConfig::n_long_minus)
      .def_readwrite("n_long_plus", &grid::HabitatConfig::n_long_plus)
      .def("validate", &grid::HabitatConfig::validate);

  py::class_<sweep::ContourSpec>(m, "ContourSpec")
      .def(py::init<>())
      .def_readwrite("mu", &sweep::ContourSpec::mu)
      .def_readwrite("beta", &sweep::ContourSpec::beta)
      .def_readwrite("n_nodes", &sweep::ContourSpec::n_nodes)
      .def_readwrite("t_min", &sweep::ContourSpec::t_min)
      .def_readwrite("t_max", &sweep::ContourSpec::t_max);

  m.def("principal_arg", &sector::principal_arg, "z"_a,
        "principal argument in (-pi, pi]");

  m.def(
      "determinant_symbol",
      [](cd z, const grid::HabitatConfig& cfg, cd lam) {
        sector::SymbolParams p;
        p.ell = cfg.ell;
        p.L = cfg.L;
        p.d_minus = cfg.d_minus;
        p.d_plus = cfg.d_plus;
        p.r_minus = cfg.r_minus;
        p.r_plus = cfg.r_plus;
        p.q = cfg.q;
        p.lambda = lam;
        return sector::determinant_symbol(z, p);
      },
      "z"_a, "cfg"_a, "lam"_a, "interface determinant symbol f(z)");

  m.def(
      "dirichlet_laplacian",
      [](int n) { return opcore::build_dirichlet_laplacian(n).matrix; }, "n"_a);

  m.def(
      "apply_resolvent",
      [](const grid::HabitatConfig& cfg, cd lam, double eps0,
         const Eigen::MatrixXcd& f_minus, const Eigen::MatrixXcd& f_plus) {
        const auto w = transmission::apply_resolvent(
            cfg, lam, eps0, make_grid(cfg, f_minus, f_plus));
        return py::make_tuple(w.minus, w.plus);
      },
      "cfg"_a, "lam"_a, "eps0"_a, "f_minus"_a, "f_plus"_a,
      "(S - lambda)^{-1} f through the explicit boundary-coefficient "
      "formulas");

  m.def(
      "direct_resolvent_solve",
      [](const grid::HabitatConfig& cfg, cd lam,
         const Eigen::MatrixXcd& f_minus, const Eigen::MatrixXcd& f_plus) {
        const auto op = direct2d::build_2d_operator(cfg);
        const auto w =
            direct2d::direct_resolvent_solve(op, lam, make_grid(cfg, f_minus, f_plus));
        return py::make_tuple(w.minus, w.plus);
      },
      "cfg"_a, "lam"_a, "f_minus"_a, "f_plus"_a,
      "sparse 2D finite-difference resolvent solve (oracle path)");

  m.def(
      "resolvent_norm",
      [](const grid::HabitatConfig& cfg, cd lam, double eps0,
         const std::string& kind, uint64_t seed) {
        const auto rec = sweep::resolvent_norm(
            cfg, lam, eps0, grid::norm_kind_from_string(kind), seed);
        py::dict d;
        d["lambda"] = rec.lambda;
        d["norm"] = rec.norm_estimate;
        d["scaled"] = rec.scaled;
        d["two_sided"] = rec.two_sided;
        d["iterations"] = rec.iterations;
        return d;
      },
      "cfg"_a, "lam"_a, "eps0"_a, "kind"_a = "p2", "seed"_a = 1234);

  m.def(
      "semigroup_apply",
      [](const grid::HabitatConfig& cfg, const sweep::ContourSpec& contour,
         double eps0, double t, const Eigen::MatrixXcd& u_minus,
         const Eigen::MatrixXcd& u_plus) {
        const auto w = sweep::semigroup_apply(cfg, contour, eps0, t,
                                              make_grid(cfg, u_minus, u_plus));
        return py::make_tuple(w.minus, w.plus);
      },
      "cfg"_a, "contour"_a, "eps0"_a, "t"_a, "u_minus"_a, "u_plus"_a,
      "e^{tS} u by hyperbola contour quadrature");

  m.def(
      "certify_symbol_floor",
      [](const grid::HabitatConfig& cfg, double eps0, int n_radial,
         int n_angular) {
        sector::SectorSpec spec;
        spec.epsilon0 = eps0;
        spec.radius_min = 1e-3;
        spec.radius_max = 1e6;
        spec.n_radial = n_radial;
        spec.n_angular = n_angular;
        spec.big_R = 10.0;
        std::vector<sector::SymbolParams> ps;
        for (const cd lam : sector::sector_lambda_grid(eps0, 7, 7, 1e-2, 1e5)) {
          sector::SymbolParams p;
          p.ell = cfg.ell;
          p.L = cfg.L;
          p.d_minus = cfg.d_minus;
          p.d_plus = cfg.d_plus;
          p.r_minus = cfg.r_minus;
          p.r_plus = cfg.r_plus;
          p.q = cfg.q;
          p.lambda = lam;
          ps.push_back(p);
        }
        const auto cert = sector::certify_symbol_floor(spec, ps);
        py::dict d;
        d["min_abs_f"] = cert.min_abs_f;
        d["floor"] = cert.floor;
        d["pass"] = cert.pass;
        d["samples"] = cert.samples;
        return d;
      },
      "cfg"_a, "eps0"_a, "n_radial"_a = 40, "n_angular"_a = 21);

  m.def("default_config",
        [] { return bench::default_config().habitat; },
        "the habitat configuration the acceptance suite runs on");

  m.def("sweep_lambda_grid", &sweep::sweep_lambda_grid, "eps0"_a,
        "r_min"_a = 1.0, "r_max"_a = 1e6, "n_radii"_a = 13);
}
