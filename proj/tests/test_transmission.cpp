/*
 * Checks for the explicit resolvent pipeline: the determinant factor against
 * the scalar symbol, convolution closed forms and quadrature order, the
 * boundary-coefficient system against independent solvers (Cramer, stacked
 * block LU), the full resolvent against an oracle eigenvector and the
 * resolvent identity, spectral/dense path agreement, and the regularity
 * surrogates under grid refinement.
 */

#include "semiperm/transmission.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "semiperm/complex_geometry.hpp"
#include "semiperm/direct2d.hpp"
#include "test_support.hpp"

using namespace semiperm;
using namespace semiperm::transmission;
using grid::GridFunction;
using grid::HabitatConfig;
using grid::NormKind;
using testsup::check;
using testsup::check_near;
using testsup::check_throws;
using testsup::section;

namespace {

constexpr double kEps0 = 0.40;

HabitatConfig small_config() {
  HabitatConfig h;
  h.ell = 0.9;
  h.L = 1.1;
  h.d_minus = 0.8;
  h.d_plus = 1.2;
  h.r_minus = 0.5;
  h.r_plus = 0.7;
  h.q = 0.6;
  h.n_transversal = 8;
  h.n_long_minus = 49;
  h.n_long_plus = 49;
  return h;
}

sector::SymbolParams params_of(const HabitatConfig& h, cd lambda) {
  sector::SymbolParams p;
  p.ell = h.ell;
  p.L = h.L;
  p.d_minus = h.d_minus;
  p.d_plus = h.d_plus;
  p.r_minus = h.r_minus;
  p.r_plus = h.r_plus;
  p.q = h.q;
  p.lambda = lambda;
  return p;
}

void test_workspace() {
  section("workspace assembly and the determinant factor");
  {
    // 1x1 cross-section: D* equals the scalar symbol at z = 8
    HabitatConfig h = small_config();
    h.n_transversal = 1;
    const auto ws = assemble_workspace(h, cd(0.0, 0.0), kEps0);
    const cd dstar = 1.0 / ws.spec->dstar_inv[0];
    const cd f8 = sector::determinant_symbol(cd(8.0, 0.0), params_of(h, cd(0.0, 0.0)));
    check(std::abs(dstar - f8) < 1e-13, "1x1 determinant factor equals f(8)");
  }
  {
    // the spectral inverse is the scalar map 1/f(-mu_k) on every mode
    const HabitatConfig h = small_config();
    const cd lam(3.0, 4.0);
    const auto ws = assemble_workspace(h, lam, kEps0);
    double worst = 0.0;
    for (int k = 0; k < h.n_transversal; ++k) {
      const cd f = sector::determinant_symbol(cd(-ws.mu[k], 0.0),
                                              params_of(h, lam));
      worst = std::max(worst, std::abs(ws.spec->dstar_inv[k] - 1.0 / f));
    }
    check(worst < 1e-13, "D*^{-1} equals 1/f(-mu_k) mode by mode");
  }
  {
    const HabitatConfig h = small_config();
    const double bound = 1.0 / std::sin(kEps0 / 2.0) + 1e-6;
    double max_norm = 0.0;
    double max_resid = 0.0, dinv_min = 1e300, dinv_max = 0.0;
    for (const double r : {1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6})
      for (const double a : {0.0, 2.7, -2.7}) {
        const cd lam = std::polar(r, a);
        const auto ws = assemble_workspace(h, lam, kEps0);
        max_norm = std::max(max_norm, dstar_inverse_norm(ws));
        max_resid = std::max(max_resid, det_identity_residual(ws));
        const Eigen::ArrayXcd dinv =
            ws.spec->dstar_inv * ws.spec->inv_plus_2L * ws.spec->inv_plus_2ell;
        dinv_min = std::min(dinv_min, dinv.abs().maxCoeff());
        dinv_max = std::max(dinv_max, dinv.abs().maxCoeff());
      }
    check(max_norm <= bound, "||D*^{-1}|| <= 1/sin(eps0/2) + 1e-6 over sweep");
    check(max_resid <= 1e-9, "D D^{-1} = I to 1e-9 over sweep");
    check(dinv_max <= 10.0 * dinv_min,
          "||D^{-1}|| bounded by one constant across decades");
  }
  check_throws(
      [] {
        assemble_workspace(small_config(), std::polar(1.0, 2.9), kEps0);
      },
      "lambda outside the sector is a domain error");
}

void test_convolution() {
  section("convolution terms");
  {
    const HabitatConfig h = small_config();
    const auto ws = assemble_workspace(h, cd(0.0, 0.0), kEps0);
    const Eigen::MatrixXcd zero =
        Eigen::MatrixXcd::Zero(h.n_long_minus, h.n_transversal);
    const auto conv = convolve_v(ws, Side::minus, zero);
    check(conv.v.norm() == 0.0 && conv.vprime0.norm() == 0.0,
          "g = 0 gives v = 0");
  }
  {
    // scalar constant forcing: v(x) = -(g0/b^2)(1 - (e^{-b(x+ell)} + e^{bx})/2)
    HabitatConfig h = small_config();
    h.n_transversal = 1;
    h.d_minus = 1.0;
    h.r_minus = 1.0;  // b = sqrt(8 + 1) = 3 on the minus side
    h.n_long_minus = 513;
    const auto ws = assemble_workspace(h, cd(0.0, 0.0), kEps0);
    const double b = 3.0;
    check_near(std::abs(ws.spec->b_minus[0] + b), 0.0, 1e-12,
               "scalar generator value -3");
    const double g0 = 1.7;
    Eigen::MatrixXcd g =
        Eigen::MatrixXcd::Constant(h.n_long_minus, 1, cd(g0, 0.0));
    const auto conv = convolve_v(ws, Side::minus, g);
    double worst = 0.0;
    for (int j = 0; j < h.n_long_minus; ++j) {
      const double x = h.x_minus(j);
      const double expected =
          -(g0 / (b * b)) *
          (1.0 - 0.5 * (std::exp(-b * (x + h.ell)) + std::exp(b * x)));
      worst = std::max(worst, std::abs(conv.v(j, 0) - cd(expected, 0.0)));
    }
    check(worst < 1e-6, "constant forcing matches the closed form (1e-6)");
    check(worst < 1e-10, "exponential trapezoid is exact for constant g");
    // exact derivative trace: v'(0) = (1/2) int e^{-t b_signed} g dt
    const double vp_expected = 0.5 * g0 * (1.0 - std::exp(-b * h.ell)) / b;
    check_near(conv.vprime0[0].real(), vp_expected, 1e-10,
               "derivative trace at the interface");
  }
  {
    // self-convergence at order 2 on a smooth non-polynomial forcing
    HabitatConfig base = small_config();
    base.n_transversal = 1;
    auto g_fun = [](double t) { return cd(std::cos(3.0 * t), std::sin(2.0 * t)); };
    auto run = [&](int m) {
      HabitatConfig h = base;
      h.n_long_minus = m + 1;
      const auto ws = assemble_workspace(h, cd(2.0, 1.0), kEps0);
      Eigen::MatrixXcd g(h.n_long_minus, 1);
      for (int j = 0; j < h.n_long_minus; ++j) g(j, 0) = g_fun(h.x_minus(j));
      return convolve_v(ws, Side::minus, g);
    };
    const auto ref = run(1024);
    auto err = [&](int m, const SideConvolution& conv) {
      double worst = 0.0;
      const int stride = 1024 / m;
      for (int j = 0; j <= m; ++j)
        worst = std::max(worst,
                         std::abs(conv.v(j, 0) - ref.v(j * stride, 0)));
      return worst;
    };
    const double e64 = err(64, run(64));
    const double e128 = err(128, run(128));
    const double ratio = e64 / e128;
    check(ratio > 3.0 && ratio < 5.0,
          "halving dx shrinks the error ~4x (order 2)");
  }
}

void test_boundary_data() {
  section("interface data");
  const HabitatConfig h = small_config();
  const auto ws = assemble_workspace(h, cd(1.0, 1.0), kEps0);
  {
    const auto cm = convolve_v(
        ws, Side::minus,
        Eigen::MatrixXcd::Zero(h.n_long_minus, h.n_transversal));
    const auto cp = convolve_v(
        ws, Side::plus, Eigen::MatrixXcd::Zero(h.n_long_plus, h.n_transversal));
    const auto d = boundary_data(ws, cm, cp);
    check(d.pi_prime.norm() == 0.0 && d.pi_double_prime.norm() == 0.0,
          "g = 0 gives vanishing interface data");
  }
  {
    // mirror-symmetric configuration: g+(x) = g-(-x) forces Pi'' = Pi'.
    // (With symmetric coefficients the mirror swaps k- and j+, and both
    // reduced equations collapse to B(I + e^{2 ell B}) k- = Pi' = Pi''.)
    HabitatConfig hs = small_config();
    hs.d_plus = hs.d_minus;
    hs.r_plus = hs.r_minus;
    hs.L = hs.ell;
    hs.n_long_plus = hs.n_long_minus;
    const auto wss = assemble_workspace(hs, cd(0.5, 0.8), kEps0);
    GridFunction g = GridFunction::sample(hs, [&](double x, double y) {
      const double s = x < 0.0 ? -x : x;  // even in the mirrored coordinate
      return cd(std::cos(2.0 * s) * std::sin(3.14159265358979324 * y), 0.3 * s);
    });
    const auto cm = convolve_v(wss, Side::minus, g.minus);
    const auto cp = convolve_v(wss, Side::plus, g.plus);
    const auto d = boundary_data(wss, cm, cp);
    check((d.pi_prime - d.pi_double_prime).norm() <=
              1e-10 * (1.0 + d.pi_prime.norm()),
          "mirror symmetry: Pi'' = Pi'");
  }
  {
    // interface data is grid-converged at order ~2
    auto data_at = [&](int m) {
      HabitatConfig hh = small_config();
      hh.n_long_minus = m + 1;
      hh.n_long_plus = m + 1;
      const auto wsh = assemble_workspace(hh, cd(1.0, 1.0), kEps0);
      GridFunction g = GridFunction::sample(hh, [](double x, double y) {
        return cd(std::cos(2.0 * x) * y * (1.0 - y), std::sin(x + y));
      });
      const auto cm = convolve_v(wsh, Side::minus, g.minus);
      const auto cp = convolve_v(wsh, Side::plus, g.plus);
      return boundary_data(wsh, cm, cp);
    };
    const auto d1 = data_at(32), d2 = data_at(64), d3 = data_at(128);
    const double e1 = (d1.pi_prime - d3.pi_prime).norm();
    const double e2 = (d2.pi_prime - d3.pi_prime).norm();
    check(e1 / e2 > 2.5 && e1 / e2 < 6.0,
          "interface data refines at second order");
  }
}

void test_boundary_solve() {
  section("boundary-coefficient solve");
  const HabitatConfig h1 = [&] {
    HabitatConfig h = small_config();
    h.n_transversal = 1;
    return h;
  }();
  const cd lambda(1.3, 0.9);
  {
    const auto ws = assemble_workspace(h1, lambda, kEps0);
    GridFunction g = GridFunction::sample(h1, [](double x, double y) {
      return cd(std::cos(x) * y, std::sin(2.0 * x));
    });
    const auto cm = convolve_v(ws, Side::minus, g.minus);
    const auto cp = convolve_v(ws, Side::plus, g.plus);
    const auto data = boundary_data(ws, cm, cp);
    const auto bc = solve_boundary_coefficients(ws, data, cm, cp);

    // independent scalar solve by Cramer's rule
    const auto& pd = *ws.spec;
    const cd bm = pd.b_minus[0], bp = pd.b_plus[0];
    const cd e2l = pd.prop_2ell[0], e2L = pd.prop_2L[0];
    const cd qm = ws.q_minus, qp = ws.q_plus;
    const cd s11 = (1.0 + e2l) - qm / bm * (1.0 - e2l);
    const cd s12 = qm / bm * (1.0 - e2L);
    const cd s21 = qp / bp * (1.0 - e2l);
    const cd s22 = (1.0 + e2L) - qp / bp * (1.0 - e2L);
    const cd rhs1 = data.pi_prime[0] / bm;
    const cd rhs2 = data.pi_double_prime[0] / bp;
    const cd det = s11 * s22 - s12 * s21;
    const cd k_minus = (rhs1 * s22 - s12 * rhs2) / det;
    const cd j_plus = (s11 * rhs2 - rhs1 * s21) / det;
    check(std::abs(bc.k_minus[0] - k_minus) < 1e-12 * std::abs(k_minus),
          "scalar case matches Cramer's rule to 1e-12");
    check(std::abs(bc.j_plus[0] - j_plus) < 1e-12 * std::abs(j_plus),
          "scalar case matches Cramer's rule (j+)");
    check(boundary_system_residual(ws, data, cm, cp, bc) <= 1e-8,
          "four-condition system residual <= 1e-8 (scalar)");
  }
  {
    // stacked 2n x 2n block system solved by generic LU (dense path)
    HabitatConfig h = small_config();
    h.n_long_minus = 33;
    h.n_long_plus = 33;
    const auto ws = assemble_workspace(h, lambda, kEps0, Path::dense);
    GridFunction g = GridFunction::random_smooth(h, 4242);
    const auto cm = convolve_v(ws, Side::minus, g.minus);
    const auto cp = convolve_v(ws, Side::plus, g.plus);
    const auto data = boundary_data(ws, cm, cp);
    const auto bc = solve_boundary_coefficients(ws, data, cm, cp);

    const int n = h.n_transversal;
    const auto& pd = *ws.dense;
    const Eigen::MatrixXcd ident = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    big.topLeftCorner(n, n) =
        (ident + pd.prop_2ell) -
        ws.q_minus * pd.inv_b_minus * (ident - pd.prop_2ell);
    big.topRightCorner(n, n) = ws.q_minus * pd.inv_b_minus * (ident - pd.prop_2L);
    big.bottomLeftCorner(n, n) =
        ws.q_plus * pd.inv_b_plus * (ident - pd.prop_2ell);
    big.bottomRightCorner(n, n) =
        (ident + pd.prop_2L) - ws.q_plus * pd.inv_b_plus * (ident - pd.prop_2L);
    Eigen::VectorXcd rhs(2 * n);
    rhs.head(n) = pd.inv_b_minus * data.pi_prime;
    rhs.tail(n) = pd.inv_b_plus * data.pi_double_prime;
    const Eigen::VectorXcd sol = big.partialPivLu().solve(rhs);
    check((bc.k_minus - sol.head(n)).norm() <= 1e-9 * (1.0 + sol.norm()),
          "block-LU oracle matches k- to 1e-9");
    check((bc.j_plus - sol.tail(n)).norm() <= 1e-9 * (1.0 + sol.norm()),
          "block-LU oracle matches j+ to 1e-9");
    check(boundary_system_residual(ws, data, cm, cp, bc) <= 1e-8,
          "four-condition system residual <= 1e-8 (dense)");
  }
  {
    // zero data gives zero coefficients
    const auto ws = assemble_workspace(h1, lambda, kEps0);
    const Eigen::MatrixXcd zm = Eigen::MatrixXcd::Zero(h1.n_long_minus, 1);
    const Eigen::MatrixXcd zp = Eigen::MatrixXcd::Zero(h1.n_long_plus, 1);
    const auto cm = convolve_v(ws, Side::minus, zm);
    const auto cp = convolve_v(ws, Side::plus, zp);
    const auto bc = solve_boundary_coefficients(ws, boundary_data(ws, cm, cp),
                                                cm, cp);
    check(bc.j_minus.norm() + bc.k_minus.norm() + bc.j_plus.norm() +
                  bc.k_plus.norm() ==
              0.0,
          "zero data gives zero coefficients");
  }
}

void test_apply_resolvent() {
  section("resolvent application");
  const cd lambda(1.5, 2.5);
  {
    const HabitatConfig h = small_config();
    const auto ws = assemble_workspace(h, lambda, kEps0);
    const GridFunction w = apply_resolvent(ws, GridFunction::zero(h));
    check(grid::norm(w, h, NormKind::p2) == 0.0, "f = 0 gives w = 0");
  }
  {
    // residual contracts on a smooth forcing
    const HabitatConfig h = small_config();
    const auto ws = assemble_workspace(h, lambda, kEps0);
    const GridFunction f = GridFunction::random_smooth(h, 99);
    const GridFunction w = apply_resolvent(ws, f);
    const auto res = resolvent_residuals(ws, f, w);
    check(res.dirichlet_minus <= 1e-12 && res.dirichlet_plus <= 1e-12,
          "outer Dirichlet values vanish");
    check(res.ode_minus < 1.0 && res.ode_plus < 1.0,
          "interior residual finite at coarse resolution");
    // interface residual decays at ~ order 2
    auto iface_at = [&](int m) {
      HabitatConfig hh = small_config();
      hh.n_long_minus = m + 1;
      hh.n_long_plus = m + 1;
      const auto wsh = assemble_workspace(hh, lambda, kEps0);
      const GridFunction fh = GridFunction::random_smooth(hh, 99);
      const GridFunction wh = apply_resolvent(wsh, fh);
      const auto r = resolvent_residuals(wsh, fh, wh);
      return std::max(r.interface_minus, r.interface_plus);
    };
    const double r1 = iface_at(48), r2 = iface_at(96);
    check(r1 / r2 > 2.5 && r1 / r2 < 6.5, "interface residual is order ~2");
  }
  {
    // eigenvector of the direct 2D operator: w = f/(nu - lambda)
    HabitatConfig h = small_config();
    h.n_transversal = 2;
    h.n_long_minus = 2049;
    h.n_long_plus = 2049;
    const auto op = direct2d::build_2d_operator(h);
    const auto pairs = direct2d::smallest_eigenpairs(op, 1);
    const GridFunction f = op.extend_with_traces(pairs.vectors[0].cast<cd>());
    const double nu = pairs.values[0];
    const auto ws = assemble_workspace(h, lambda, kEps0);
    const GridFunction w = apply_resolvent(ws, f);
    const GridFunction expected = (cd(1.0, 0.0) / (nu - lambda)) * f;
    const double rel = grid::norm(w - expected, h, NormKind::p2) /
                       grid::norm(expected, h, NormKind::p2);
    check(rel <= 1e-6, "oracle eigenvector maps to f/(nu - lambda) to 1e-6");
  }
  {
    // resolvent identity on a fine grid (the quadrature is the only
    // deviation from an exact resolvent family, so the grid must be fine)
    HabitatConfig h = small_config();
    h.n_transversal = 2;
    h.n_long_minus = 8193;
    h.n_long_plus = 8193;
    const cd l1(1.0, 2.0), l2(3.0, -1.0);
    const GridFunction f = GridFunction::random_smooth(h, 17);
    const auto ws1 = assemble_workspace(h, l1, kEps0);
    const auto ws2 = assemble_workspace(h, l2, kEps0);
    const GridFunction r1 = apply_resolvent(ws1, f);
    const GridFunction r2 = apply_resolvent(ws2, f);
    const GridFunction r12 = apply_resolvent(ws1, r2);
    const GridFunction lhs = r1 - r2;
    const GridFunction rhs = (l1 - l2) * r12;
    const double rel = grid::norm(lhs - rhs, h, NormKind::p2) /
                       grid::norm(lhs, h, NormKind::p2);
    check(rel <= 1e-7, "resolvent identity to 1e-7 relative");
  }
  {
    // spectral and dense paths agree on the symmetric operator
    HabitatConfig h = small_config();
    h.n_long_minus = 33;
    h.n_long_plus = 33;
    const GridFunction f = GridFunction::random_smooth(h, 5);
    const GridFunction ws_ = apply_resolvent(h, lambda, kEps0, f, Path::spectral);
    const GridFunction wd = apply_resolvent(h, lambda, kEps0, f, Path::dense);
    const double rel = grid::norm(ws_ - wd, h, NormKind::p2) /
                       grid::norm(wd, h, NormKind::p2);
    check(rel <= 1e-9, "spectral/dense agreement to 1e-9");
  }
  {
    // conjugate symmetry
    const HabitatConfig h = small_config();
    const GridFunction f = GridFunction::random_smooth(h, 23);
    const GridFunction a =
        grid::conj(apply_resolvent(h, std::conj(lambda), kEps0, grid::conj(f)));
    const GridFunction b = apply_resolvent(h, lambda, kEps0, f);
    check(grid::norm(a - b, h, NormKind::p2) <=
              1e-13 * grid::norm(b, h, NormKind::p2),
          "resolvent at conj(lambda) is the conjugate map");
  }
}

void test_regularity_surrogates() {
  section("regularity surrogates under refinement");
  // operator norm of h -> B int e^{(x-s)B} h(s) ds is stable under x8
  // refinement (single cross-section mode)
  auto dv_norm = [&](int m) {
    HabitatConfig h = small_config();
    h.n_transversal = 1;
    h.n_long_minus = m + 1;
    const auto ws = assemble_workspace(h, cd(0.7, 0.4), kEps0);
    const cd b = ws.spec->b_minus[0];
    // columns of the discrete map h -> B v(h) via unit probes; v is the sum
    // of the two one-sided kernel convolutions scaled by B^{-1}/2
    Eigen::MatrixXcd k(m + 1, m + 1);
    for (int c = 0; c <= m; ++c) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(m + 1, 1);
      e(c, 0) = 1.0;
      k.col(c) = convolve_v(ws, Side::minus, e).v.col(0);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k);
    return std::abs(b) * svd.singularValues()(0);
  };
  const double n64 = dv_norm(64);
  const double n512 = dv_norm(512);
  check(std::abs(n64 - n512) <= 0.2 * std::max(n64, n512),
        "norm of B(convolution) varies < 20% under x8 refinement");

  // trace functional h -> B int_0^L e^{sB} h(s) ds stays bounded
  auto trace_norm = [&](int m) {
    HabitatConfig h = small_config();
    h.n_transversal = 1;
    h.n_long_plus = m + 1;
    const auto ws = assemble_workspace(h, cd(0.7, 0.4), kEps0);
    const cd b = ws.spec->b_plus[0];
    Eigen::VectorXcd row(m + 1);
    for (int c = 0; c <= m; ++c) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(m + 1, 1);
      e(c, 0) = 1.0;
      row[c] = convolve_v(ws, Side::plus, e).j_right[0];
    }
    // dual norm against the weighted l2 norm of h
    const double dx = h.dx_plus();
    double acc = 0.0;
    for (int c = 0; c <= m; ++c) {
      const double w = dx * ((c == 0 || c == m) ? 0.5 : 1.0);
      acc += std::norm(row[c]) / w;
    }
    return std::abs(b) * std::sqrt(acc);
  };
  const double t64 = trace_norm(64);
  const double t512 = trace_norm(512);
  check(std::abs(t64 - t512) <= 0.2 * std::max(t64, t512),
        "trace functional norm varies < 20% under x8 refinement");
}

}  // namespace

int main() {
  test_workspace();
  test_convolution();
  test_boundary_data();
  test_boundary_solve();
  test_apply_resolvent();
  test_regularity_surrogates();
  return testsup::finish();
}
