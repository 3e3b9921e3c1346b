#include "semiperm/transmission.hpp"

#include <cmath>

#include "semiperm/complex_geometry.hpp"
#include "semiperm/matrix_functions.hpp"

namespace semiperm::transmission {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct SpectralAlg {
  using Coef = ArrayXcd;
  static VectorXcd mul(const Coef& c, const VectorXcd& v) {
    return (c * v.array()).matrix();
  }
};

struct DenseAlg {
  using Coef = MatrixXcd;
  static VectorXcd mul(const Coef& c, const VectorXcd& v) { return c * v; }
};

template <class Alg>
const PathData<typename Alg::Coef>& path_data(const ResolventWorkspace& ws);

template <>
const PathData<ArrayXcd>& path_data<SpectralAlg>(const ResolventWorkspace& ws) {
  return *ws.spec;
}
template <>
const PathData<MatrixXcd>& path_data<DenseAlg>(const ResolventWorkspace& ws) {
  return *ws.dense;
}

// ---- spectral path assembly ------------------------------------------------

ArrayXcd array_propagator(const ArrayXcd& b, double x) {
  ArrayXcd out(b.size());
  for (Eigen::Index k = 0; k < b.size(); ++k)
    out[k] = opcore::scalar_propagator(b[k], x);
  return out;
}

PathData<ArrayXcd> assemble_spectral(const ResolventWorkspace& ws) {
  const HabitatConfig& cfg = ws.cfg;
  const Eigen::Index n = ws.mu.size();
  PathData<ArrayXcd> pd;

  pd.b_minus.resize(n);
  pd.b_plus.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    pd.b_minus[k] =
        opcore::generator_eigenvalue(ws.mu[k], cfg.d_minus, cfg.r_minus, ws.lambda);
    pd.b_plus[k] =
        opcore::generator_eigenvalue(ws.mu[k], cfg.d_plus, cfg.r_plus, ws.lambda);
  }
  pd.inv_b_minus = pd.b_minus.inverse();
  pd.inv_b_plus = pd.b_plus.inverse();

  pd.prop_ell = array_propagator(pd.b_minus, cfg.ell);
  pd.prop_L = array_propagator(pd.b_plus, cfg.L);
  pd.prop_2ell = array_propagator(pd.b_minus, 2.0 * cfg.ell);
  pd.prop_2L = array_propagator(pd.b_plus, 2.0 * cfg.L);
  pd.inv_plus_2ell = (1.0 + pd.prop_2ell).inverse();
  pd.inv_plus_2L = (1.0 + pd.prop_2L).inverse();
  pd.inv_minus_2ell = (1.0 - pd.prop_2ell).inverse();
  pd.inv_minus_2L = (1.0 - pd.prop_2L).inverse();

  // D* eigenvalues; on this path they coincide with the determinant symbol
  // f(-mu_k).
  ArrayXcd dstar =
      1.0 -
      ws.q_plus * (pd.inv_b_plus * (1.0 - pd.prop_2L) * pd.inv_plus_2L) -
      ws.q_minus * (pd.inv_b_minus * (1.0 - pd.prop_2ell) * pd.inv_plus_2ell);
  const double dmin = dstar.abs().minCoeff();
  const double dmax = dstar.abs().maxCoeff();
  if (!(dmin > 0.0) || dmax / dmin > 1e12)
    throw std::runtime_error(
        "assemble_workspace: determinant factor numerically singular "
        "(condition > 1e12) — inadmissible epsilon0 or a bug");
  pd.dstar_inv = dstar.inverse();

  pd.pm_left.resize(cfg.n_long_minus);
  pd.pm_right.resize(cfg.n_long_minus);
  for (int j = 0; j < cfg.n_long_minus; ++j) {
    pd.pm_left[j] = array_propagator(pd.b_minus, cfg.x_minus(j) + cfg.ell);
    pd.pm_right[j] = array_propagator(pd.b_minus, -cfg.x_minus(j));
  }
  pd.pp_left.resize(cfg.n_long_plus);
  pd.pp_right.resize(cfg.n_long_plus);
  for (int j = 0; j < cfg.n_long_plus; ++j) {
    pd.pp_left[j] = array_propagator(pd.b_plus, cfg.x_plus(j));
    pd.pp_right[j] = array_propagator(pd.b_plus, cfg.L - cfg.x_plus(j));
  }

  auto slice_weights = [](const ArrayXcd& b, double dx, ArrayXcd& P,
                          ArrayXcd& wl0, ArrayXcd& wl1, ArrayXcd& wr0,
                          ArrayXcd& wr1) {
    const Eigen::Index n = b.size();
    P.resize(n); wl0.resize(n); wl1.resize(n); wr0.resize(n); wr1.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const cd z = b[k] * dx;
      P[k] = opcore::scalar_propagator(b[k], dx);
      const cd p1 = matfun::phi1(z), p2 = matfun::phi2(z),
               p2r = matfun::phi2r(z);
      wl0[k] = dx * (p1 - p2);
      wl1[k] = dx * p2;
      wr0[k] = dx * (p1 - p2r);
      wr1[k] = dx * p2r;
    }
  };
  slice_weights(pd.b_minus, cfg.dx_minus(), pd.m_P, pd.m_wl0, pd.m_wl1,
                pd.m_wr0, pd.m_wr1);
  slice_weights(pd.b_plus, cfg.dx_plus(), pd.p_P, pd.p_wl0, pd.p_wl1,
                pd.p_wr0, pd.p_wr1);
  return pd;
}

// ---- dense path assembly ---------------------------------------------------

PathData<MatrixXcd> assemble_dense(const ResolventWorkspace& ws,
                                   const MatrixXcd& a) {
  const HabitatConfig& cfg = ws.cfg;
  const Eigen::Index n = a.rows();
  const MatrixXcd ident = MatrixXcd::Identity(n, n);
  PathData<MatrixXcd> pd;

  const opcore::GeneratorMatrix bm = opcore::build_generator(
      a, cfg.d_minus, cfg.r_minus, ws.lambda, opcore::GeneratorKind::b_minus);
  const opcore::GeneratorMatrix bp = opcore::build_generator(
      a, cfg.d_plus, cfg.r_plus, ws.lambda, opcore::GeneratorKind::b_plus);
  pd.b_minus = bm.matrix;
  pd.b_plus = bp.matrix;
  pd.inv_b_minus = bm.matrix.partialPivLu().solve(ident);
  pd.inv_b_plus = bp.matrix.partialPivLu().solve(ident);

  pd.pm_left.resize(cfg.n_long_minus);
  pd.pm_right.resize(cfg.n_long_minus);
  const MatrixXcd pdx_m = opcore::propagator(bm, cfg.dx_minus());
  pd.pm_left[0] = ident;
  for (int j = 1; j < cfg.n_long_minus; ++j)
    pd.pm_left[j] = pd.pm_left[j - 1] * pdx_m;
  pd.pm_right[cfg.n_long_minus - 1] = ident;
  for (int j = cfg.n_long_minus - 2; j >= 0; --j)
    pd.pm_right[j] = pd.pm_right[j + 1] * pdx_m;

  pd.pp_left.resize(cfg.n_long_plus);
  pd.pp_right.resize(cfg.n_long_plus);
  const MatrixXcd pdx_p = opcore::propagator(bp, cfg.dx_plus());
  pd.pp_left[0] = ident;
  for (int j = 1; j < cfg.n_long_plus; ++j)
    pd.pp_left[j] = pd.pp_left[j - 1] * pdx_p;
  pd.pp_right[cfg.n_long_plus - 1] = ident;
  for (int j = cfg.n_long_plus - 2; j >= 0; --j)
    pd.pp_right[j] = pd.pp_right[j + 1] * pdx_p;

  pd.prop_ell = pd.pm_right[0];
  pd.prop_L = pd.pp_right[0];
  pd.prop_2ell = pd.prop_ell * pd.prop_ell;
  pd.prop_2L = pd.prop_L * pd.prop_L;
  pd.inv_plus_2ell = (ident + pd.prop_2ell).partialPivLu().solve(ident);
  pd.inv_plus_2L = (ident + pd.prop_2L).partialPivLu().solve(ident);
  pd.inv_minus_2ell = (ident - pd.prop_2ell).partialPivLu().solve(ident);
  pd.inv_minus_2L = (ident - pd.prop_2L).partialPivLu().solve(ident);

  const MatrixXcd dstar =
      ident -
      ws.q_plus * pd.inv_b_plus * (ident - pd.prop_2L) * pd.inv_plus_2L -
      ws.q_minus * pd.inv_b_minus * (ident - pd.prop_2ell) * pd.inv_plus_2ell;
  const Eigen::JacobiSVD<MatrixXcd> svd(dstar);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  if (!(smin > 0.0) || smax / smin > 1e12)
    throw std::runtime_error(
        "assemble_workspace: determinant factor numerically singular "
        "(condition > 1e12) — inadmissible epsilon0 or a bug");
  pd.dstar_inv = dstar.partialPivLu().solve(ident);

  const matfun::PhiSet phi_m = matfun::phi_matrices(cfg.dx_minus() * pd.b_minus);
  const matfun::PhiSet phi_p = matfun::phi_matrices(cfg.dx_plus() * pd.b_plus);
  pd.m_P = pdx_m;
  pd.m_wl0 = cfg.dx_minus() * (phi_m.phi1 - phi_m.phi2);
  pd.m_wl1 = cfg.dx_minus() * phi_m.phi2;
  pd.m_wr0 = cfg.dx_minus() * (phi_m.phi1 - phi_m.phi2r);
  pd.m_wr1 = cfg.dx_minus() * phi_m.phi2r;
  pd.p_P = pdx_p;
  pd.p_wl0 = cfg.dx_plus() * (phi_p.phi1 - phi_p.phi2);
  pd.p_wl1 = cfg.dx_plus() * phi_p.phi2;
  pd.p_wr0 = cfg.dx_plus() * (phi_p.phi1 - phi_p.phi2r);
  pd.p_wr1 = cfg.dx_plus() * phi_p.phi2r;
  return pd;
}

// ---- shared pipeline ------------------------------------------------------

struct ConvWork {
  MatrixXcd v;
  MatrixXcd il, ir;  // running kernel integrals
  VectorXcd v_outer, v_inner, vprime0, jl, jr;
};

template <class Alg>
ConvWork convolve_side(const ResolventWorkspace& ws, Side side,
                       const MatrixXcd& g) {
  const auto& pd = path_data<Alg>(ws);
  const bool minus = side == Side::minus;
  const auto& P = minus ? pd.m_P : pd.p_P;
  const auto& wl0 = minus ? pd.m_wl0 : pd.p_wl0;
  const auto& wl1 = minus ? pd.m_wl1 : pd.p_wl1;
  const auto& wr0 = minus ? pd.m_wr0 : pd.p_wr0;
  const auto& wr1 = minus ? pd.m_wr1 : pd.p_wr1;
  const auto& inv_b = minus ? pd.inv_b_minus : pd.inv_b_plus;

  const Eigen::Index nn = g.rows();
  const Eigen::Index w = g.cols();
  ConvWork cw;
  cw.il = MatrixXcd::Zero(nn, w);
  cw.ir = MatrixXcd::Zero(nn, w);
  for (Eigen::Index j = 1; j < nn; ++j) {
    const VectorXcd prev = cw.il.row(j - 1).transpose();
    const VectorXcd g0 = g.row(j - 1).transpose();
    const VectorXcd g1 = g.row(j).transpose();
    cw.il.row(j) =
        (Alg::mul(P, prev) + Alg::mul(wl0, g0) + Alg::mul(wl1, g1)).transpose();
  }
  for (Eigen::Index j = nn - 2; j >= 0; --j) {
    const VectorXcd prev = cw.ir.row(j + 1).transpose();
    const VectorXcd g0 = g.row(j).transpose();
    const VectorXcd g1 = g.row(j + 1).transpose();
    cw.ir.row(j) =
        (Alg::mul(P, prev) + Alg::mul(wr0, g0) + Alg::mul(wr1, g1)).transpose();
  }
  cw.v.resize(nn, w);
  for (Eigen::Index j = 0; j < nn; ++j) {
    const VectorXcd s = (cw.il.row(j) + cw.ir.row(j)).transpose();
    cw.v.row(j) = (0.5 * Alg::mul(inv_b, s)).transpose();
  }
  if (minus) {
    cw.v_outer = cw.v.row(0).transpose();
    cw.v_inner = cw.v.row(nn - 1).transpose();
    cw.vprime0 = 0.5 * cw.il.row(nn - 1).transpose();
    cw.jl = cw.il.row(nn - 1).transpose();  // int e^{-tB-} g
    cw.jr = cw.ir.row(0).transpose();       // int e^{(t+ell)B-} g
  } else {
    cw.v_inner = cw.v.row(0).transpose();
    cw.v_outer = cw.v.row(nn - 1).transpose();
    cw.vprime0 = -0.5 * cw.ir.row(0).transpose();
    cw.jl = cw.il.row(nn - 1).transpose();  // int e^{(L-t)B+} g
    cw.jr = cw.ir.row(0).transpose();       // int e^{tB+} g
  }
  return cw;
}

template <class Alg>
InterfaceData interface_data_impl(const ResolventWorkspace& ws,
                                  const ConvWork& cm, const ConvWork& cp) {
  const auto& pd = path_data<Alg>(ws);
  const double qm = ws.q_minus, qp = ws.q_plus;

  const VectorXcd e_ell_vouter = Alg::mul(pd.prop_ell, cm.v_outer);
  const VectorXcd e_L_vouter = Alg::mul(pd.prop_L, cp.v_outer);

  InterfaceData out;
  out.pi_prime = cm.vprime0 - Alg::mul(pd.b_minus, e_ell_vouter) +
                 qm * e_L_vouter - qm * cp.v_inner - qm * e_ell_vouter +
                 qm * cm.v_inner;
  out.pi_double_prime = -cp.vprime0 - Alg::mul(pd.b_plus, e_L_vouter) -
                        qp * e_L_vouter + qp * cp.v_inner + qp * e_ell_vouter -
                        qp * cm.v_inner;
  return out;
}

template <class Alg>
VectorXcd det_inverse_apply(const PathData<typename Alg::Coef>& pd,
                            const VectorXcd& v) {
  // D^{-1} = D*^{-1} (I + e^{2LB+})^{-1} (I + e^{2 ell B-})^{-1}
  return Alg::mul(pd.dstar_inv,
                  Alg::mul(pd.inv_plus_2L, Alg::mul(pd.inv_plus_2ell, v)));
}

template <class Alg>
BoundaryCoefficients solve_coefficients_impl(const ResolventWorkspace& ws,
                                             const InterfaceData& data,
                                             const ConvWork& cm,
                                             const ConvWork& cp) {
  const auto& pd = path_data<Alg>(ws);
  const double qm = ws.q_minus, qp = ws.q_plus;
  const VectorXcd& p1 = data.pi_prime;
  const VectorXcd& p2 = data.pi_double_prime;

  auto minus_id = [&](const typename Alg::Coef& c, const VectorXcd& v) {
    return (v - Alg::mul(c, v)).eval();  // (I - c) v
  };
  auto plus_id = [&](const typename Alg::Coef& c, const VectorXcd& v) {
    return (v + Alg::mul(c, v)).eval();  // (I + c) v
  };

  BoundaryCoefficients bc;
  {
    const VectorXcd t1 =
        plus_id(pd.prop_2L, p1) -
        qp * Alg::mul(pd.inv_b_plus, minus_id(pd.prop_2L, p1));
    const VectorXcd t2 =
        Alg::mul(pd.inv_b_plus, Alg::mul(pd.inv_b_minus, minus_id(pd.prop_2L, p2)));
    bc.k_minus =
        det_inverse_apply<Alg>(pd, (Alg::mul(pd.inv_b_minus, t1) - qm * t2).eval());
  }
  {
    const VectorXcd s1 = Alg::mul(pd.inv_b_plus, p2);
    const VectorXcd t1 =
        plus_id(pd.prop_2ell, s1) -
        qm * Alg::mul(pd.inv_b_minus, minus_id(pd.prop_2ell, s1));
    const VectorXcd t2 = Alg::mul(
        pd.inv_b_plus, minus_id(pd.prop_2ell, Alg::mul(pd.inv_b_minus, p1)));
    bc.j_plus = det_inverse_apply<Alg>(pd, (t1 - qp * t2).eval());
  }
  bc.j_minus = -Alg::mul(pd.prop_ell, bc.k_minus) - cm.v_outer;
  bc.k_plus = -Alg::mul(pd.prop_L, bc.j_plus) - cp.v_outer;
  return bc;
}

template <class Alg>
void assemble_solution(const ResolventWorkspace& ws,
                       const BoundaryCoefficients& bc, const ConvWork& cm,
                       const ConvWork& cp, MatrixXcd& w_minus,
                       MatrixXcd& w_plus) {
  const auto& pd = path_data<Alg>(ws);
  const Eigen::Index nm = cm.v.rows(), np = cp.v.rows();
  w_minus.resize(nm, cm.v.cols());
  w_plus.resize(np, cp.v.cols());
  for (Eigen::Index j = 0; j < nm; ++j)
    w_minus.row(j) = (Alg::mul(pd.pm_left[j], bc.j_minus) +
                      Alg::mul(pd.pm_right[j], bc.k_minus))
                         .transpose() +
                     cm.v.row(j);
  for (Eigen::Index j = 0; j < np; ++j)
    w_plus.row(j) = (Alg::mul(pd.pp_left[j], bc.j_plus) +
                     Alg::mul(pd.pp_right[j], bc.k_plus))
                        .transpose() +
                    cp.v.row(j);
}

}  // namespace

// ---------------------------------------------------------------------------

ResolventWorkspace assemble_workspace(const HabitatConfig& cfg, cd lambda,
                                      double epsilon0, Path path) {
  cfg.validate();
  if (!(epsilon0 > 0.0 && epsilon0 < kPi / 2))
    throw std::domain_error("assemble_workspace: epsilon0 outside (0, pi/2)");
  if (!sector::in_sector_or_zero(lambda, kPi - epsilon0))
    throw std::domain_error(
        "assemble_workspace: lambda outside S_{pi-eps0} u {0}");

  ResolventWorkspace ws;
  ws.cfg = cfg;
  ws.lambda = lambda;
  ws.epsilon0 = epsilon0;
  ws.path = path;
  ws.rho_minus = cfg.r_minus / cfg.d_minus;
  ws.rho_plus = cfg.r_plus / cfg.d_plus;
  ws.q_minus = cfg.q / cfg.d_minus;
  ws.q_plus = cfg.q / cfg.d_plus;
  ws.lambda_minus = lambda / cfg.d_minus;
  ws.lambda_plus = lambda / cfg.d_plus;

  const opcore::TransversalOperator a =
      opcore::build_dirichlet_laplacian(cfg.n_transversal);
  ws.mu = a.eigenvalues;
  ws.basis = a.eigenvectors;

  if (path == Path::spectral) {
    ws.spec = assemble_spectral(ws);
  } else {
    ws.dense = assemble_dense(ws, a.matrix.cast<cd>());
  }
  return ws;
}

SideConvolution convolve_v(const ResolventWorkspace& ws, Side side,
                           const MatrixXcd& g) {
  SideConvolution out;
  if (ws.path == Path::spectral) {
    const ConvWork cw = convolve_side<SpectralAlg>(ws, side, g * ws.basis);
    const MatrixXd bt = ws.basis.transpose();
    out.v = cw.v * bt;
    out.v_outer = bt.transpose() * cw.v_outer;
    out.v_inner = bt.transpose() * cw.v_inner;
    out.vprime0 = bt.transpose() * cw.vprime0;
    out.j_left = bt.transpose() * cw.jl;
    out.j_right = bt.transpose() * cw.jr;
  } else {
    const ConvWork cw = convolve_side<DenseAlg>(ws, side, g);
    out.v = cw.v;
    out.v_outer = cw.v_outer;
    out.v_inner = cw.v_inner;
    out.vprime0 = cw.vprime0;
    out.j_left = cw.jl;
    out.j_right = cw.jr;
  }
  return out;
}

MatrixXcd apply_abs_kernel(const ResolventWorkspace& ws, Side side,
                           const MatrixXcd& g) {
  if (ws.path == Path::spectral) {
    const ConvWork cw = convolve_side<SpectralAlg>(ws, side, g * ws.basis);
    return (cw.il + cw.ir) * ws.basis.transpose();
  }
  const ConvWork cw = convolve_side<DenseAlg>(ws, side, g);
  return cw.il + cw.ir;
}

MatrixXcd propagate_nodes(const ResolventWorkspace& ws, PropagatorFamily fam,
                          const VectorXcd& v) {
  const bool minus_side = fam == PropagatorFamily::minus_from_left ||
                          fam == PropagatorFamily::minus_from_right;
  const int nn = minus_side ? ws.cfg.n_long_minus : ws.cfg.n_long_plus;
  MatrixXcd out(nn, v.size());
  if (ws.path == Path::spectral) {
    const VectorXcd va = ws.basis.transpose() * v;
    const auto& tab = fam == PropagatorFamily::minus_from_left
                          ? ws.spec->pm_left
                          : fam == PropagatorFamily::minus_from_right
                                ? ws.spec->pm_right
                                : fam == PropagatorFamily::plus_from_left
                                      ? ws.spec->pp_left
                                      : ws.spec->pp_right;
    for (int j = 0; j < nn; ++j)
      out.row(j) = (ws.basis * SpectralAlg::mul(tab[j], va)).transpose();
  } else {
    const auto& tab = fam == PropagatorFamily::minus_from_left
                          ? ws.dense->pm_left
                          : fam == PropagatorFamily::minus_from_right
                                ? ws.dense->pm_right
                                : fam == PropagatorFamily::plus_from_left
                                      ? ws.dense->pp_left
                                      : ws.dense->pp_right;
    for (int j = 0; j < nn; ++j) out.row(j) = (tab[j] * v).transpose();
  }
  return out;
}

namespace {

// Physical-coordinate SideConvolution back into pipeline coordinates.
ConvWork to_work(const ResolventWorkspace& ws, const SideConvolution& c) {
  ConvWork cw;
  if (ws.path == Path::spectral) {
    cw.v = c.v * ws.basis;
    cw.v_outer = ws.basis.transpose() * c.v_outer;
    cw.v_inner = ws.basis.transpose() * c.v_inner;
    cw.vprime0 = ws.basis.transpose() * c.vprime0;
    cw.jl = ws.basis.transpose() * c.j_left;
    cw.jr = ws.basis.transpose() * c.j_right;
  } else {
    cw.v = c.v;
    cw.v_outer = c.v_outer;
    cw.v_inner = c.v_inner;
    cw.vprime0 = c.vprime0;
    cw.jl = c.j_left;
    cw.jr = c.j_right;
  }
  return cw;
}

}  // namespace

InterfaceData boundary_data(const ResolventWorkspace& ws,
                            const SideConvolution& conv_minus,
                            const SideConvolution& conv_plus) {
  const ConvWork cm = to_work(ws, conv_minus);
  const ConvWork cp = to_work(ws, conv_plus);
  InterfaceData d = ws.path == Path::spectral
                        ? interface_data_impl<SpectralAlg>(ws, cm, cp)
                        : interface_data_impl<DenseAlg>(ws, cm, cp);
  if (ws.path == Path::spectral) {
    d.pi_prime = (ws.basis * d.pi_prime).eval();
    d.pi_double_prime = (ws.basis * d.pi_double_prime).eval();
  }
  return d;
}

BoundaryCoefficients solve_boundary_coefficients(
    const ResolventWorkspace& ws, const InterfaceData& data,
    const SideConvolution& conv_minus, const SideConvolution& conv_plus) {
  const ConvWork cm = to_work(ws, conv_minus);
  const ConvWork cp = to_work(ws, conv_plus);
  InterfaceData d = data;
  if (ws.path == Path::spectral) {
    d.pi_prime = (ws.basis.transpose() * data.pi_prime).eval();
    d.pi_double_prime = (ws.basis.transpose() * data.pi_double_prime).eval();
  }
  BoundaryCoefficients bc =
      ws.path == Path::spectral
          ? solve_coefficients_impl<SpectralAlg>(ws, d, cm, cp)
          : solve_coefficients_impl<DenseAlg>(ws, d, cm, cp);
  if (ws.path == Path::spectral) {
    bc.j_minus = (ws.basis * bc.j_minus).eval();
    bc.k_minus = (ws.basis * bc.k_minus).eval();
    bc.j_plus = (ws.basis * bc.j_plus).eval();
    bc.k_plus = (ws.basis * bc.k_plus).eval();
  }
  return bc;
}

GridFunction apply_resolvent(const ResolventWorkspace& ws,
                             const GridFunction& f) {
  f.check_shape(ws.cfg);
  GridFunction w;
  if (ws.path == Path::spectral) {
    const MatrixXcd gm = (f.minus / cd(ws.cfg.d_minus, 0.0)) * ws.basis;
    const MatrixXcd gp = (f.plus / cd(ws.cfg.d_plus, 0.0)) * ws.basis;
    const ConvWork cm = convolve_side<SpectralAlg>(ws, Side::minus, gm);
    const ConvWork cp = convolve_side<SpectralAlg>(ws, Side::plus, gp);
    const InterfaceData d = interface_data_impl<SpectralAlg>(ws, cm, cp);
    const BoundaryCoefficients bc =
        solve_coefficients_impl<SpectralAlg>(ws, d, cm, cp);
    MatrixXcd wm, wp;
    assemble_solution<SpectralAlg>(ws, bc, cm, cp, wm, wp);
    w.minus = wm * ws.basis.transpose();
    w.plus = wp * ws.basis.transpose();
  } else {
    const MatrixXcd gm = f.minus / cd(ws.cfg.d_minus, 0.0);
    const MatrixXcd gp = f.plus / cd(ws.cfg.d_plus, 0.0);
    const ConvWork cm = convolve_side<DenseAlg>(ws, Side::minus, gm);
    const ConvWork cp = convolve_side<DenseAlg>(ws, Side::plus, gp);
    const InterfaceData d = interface_data_impl<DenseAlg>(ws, cm, cp);
    const BoundaryCoefficients bc =
        solve_coefficients_impl<DenseAlg>(ws, d, cm, cp);
    assemble_solution<DenseAlg>(ws, bc, cm, cp, w.minus, w.plus);
  }
  return w;
}

GridFunction apply_resolvent(const HabitatConfig& cfg, cd lambda,
                             double epsilon0, const GridFunction& f,
                             Path path) {
  const ResolventWorkspace ws = assemble_workspace(cfg, lambda, epsilon0, path);
  return apply_resolvent(ws, f);
}

// ---------------------------------------------------------------------------

ResolventResiduals resolvent_residuals(const ResolventWorkspace& ws,
                                       const GridFunction& f,
                                       const GridFunction& w) {
  const HabitatConfig& cfg = ws.cfg;
  f.check_shape(cfg);
  w.check_shape(cfg);
  const double h2 = cfg.h() * cfg.h();
  const double scale = 1.0 + std::max(grid::norm(f, cfg, grid::NormKind::pinf),
                                      grid::norm(w, cfg, grid::NormKind::pinf));

  auto a0_row = [&](const MatrixXcd& m, int j, int i) {
    cd acc = -2.0 * m(j, i);
    if (i > 0) acc += m(j, i - 1);
    if (i + 1 < cfg.n_transversal) acc += m(j, i + 1);
    return acc / h2;
  };

  auto side_ode = [&](const MatrixXcd& wm, const MatrixXcd& fm, double dx,
                      double d, double r) {
    double worst = 0.0;
    const cd shift = (r + ws.lambda) / d;
    for (int j = 1; j + 1 < wm.rows(); ++j)
      for (int i = 0; i < cfg.n_transversal; ++i) {
        const cd xdd = (wm(j - 1, i) - 2.0 * wm(j, i) + wm(j + 1, i)) / (dx * dx);
        const cd res = xdd + a0_row(wm, j, i) - shift * wm(j, i) - fm(j, i) / d;
        worst = std::max(worst, std::abs(res));
      }
    return worst / scale;
  };

  ResolventResiduals out;
  out.ode_minus = side_ode(w.minus, f.minus, cfg.dx_minus(), cfg.d_minus,
                           cfg.r_minus);
  out.ode_plus =
      side_ode(w.plus, f.plus, cfg.dx_plus(), cfg.d_plus, cfg.r_plus);
  out.dirichlet_minus = w.minus.row(0).cwiseAbs().maxCoeff() / scale;
  out.dirichlet_plus =
      w.plus.row(w.plus.rows() - 1).cwiseAbs().maxCoeff() / scale;

  const int m = cfg.n_long_minus - 1;
  double worst_m = 0.0, worst_p = 0.0;
  for (int i = 0; i < cfg.n_transversal; ++i) {
    const cd jump = w.plus(0, i) - w.minus(m, i);
    const cd dm = (3.0 * w.minus(m, i) - 4.0 * w.minus(m - 1, i) +
                   w.minus(m - 2, i)) /
                  (2.0 * cfg.dx_minus());
    const cd dp =
        (-3.0 * w.plus(0, i) + 4.0 * w.plus(1, i) - w.plus(2, i)) /
        (2.0 * cfg.dx_plus());
    worst_m = std::max(worst_m, std::abs(cfg.d_minus * dm - cfg.q * jump));
    worst_p = std::max(worst_p, std::abs(cfg.d_plus * dp - cfg.q * jump));
  }
  out.interface_minus = worst_m / scale;
  out.interface_plus = worst_p / scale;
  return out;
}

namespace {

template <class Alg>
double system_residual_impl(const ResolventWorkspace& ws,
                            const InterfaceData& data, const ConvWork& cm,
                            const ConvWork& cp, const VectorXcd& jm,
                            const VectorXcd& km, const VectorXcd& jp,
                            const VectorXcd& kp) {
  const auto& pd = path_data<Alg>(ws);
  const HabitatConfig& cfg = ws.cfg;

  const VectorXcd r1 = jm + Alg::mul(pd.prop_ell, km) + cm.v_outer;
  const VectorXcd r2 = kp + Alg::mul(pd.prop_L, jp) + cp.v_outer;

  const VectorXcd wm0 = Alg::mul(pd.prop_ell, jm) + km + cm.v_inner;
  const VectorXcd wp0 = jp + Alg::mul(pd.prop_L, kp) + cp.v_inner;
  const VectorXcd jump = wp0 - wm0;
  const VectorXcd wm_d = Alg::mul(pd.b_minus, Alg::mul(pd.prop_ell, jm)) -
                         Alg::mul(pd.b_minus, km) + cm.vprime0;
  const VectorXcd wp_d = Alg::mul(pd.b_plus, jp) -
                         Alg::mul(pd.b_plus, Alg::mul(pd.prop_L, kp)) +
                         cp.vprime0;
  const VectorXcd r3 = cfg.d_minus * wm_d - cfg.q * jump;
  const VectorXcd r4 = cfg.d_plus * wp_d - cfg.q * jump;

  const double scale =
      1.0 + data.pi_prime.norm() + data.pi_double_prime.norm();
  return std::max({r1.norm(), r2.norm(), r3.norm(), r4.norm()}) / scale;
}

}  // namespace

double boundary_system_residual(const ResolventWorkspace& ws,
                                const InterfaceData& data,
                                const SideConvolution& conv_minus,
                                const SideConvolution& conv_plus,
                                const BoundaryCoefficients& coef) {
  const ConvWork cm = to_work(ws, conv_minus);
  const ConvWork cp = to_work(ws, conv_plus);
  if (ws.path == Path::spectral) {
    const MatrixXd bt = ws.basis.transpose();
    return system_residual_impl<SpectralAlg>(
        ws, data, cm, cp, bt * coef.j_minus, bt * coef.k_minus,
        bt * coef.j_plus, bt * coef.k_plus);
  }
  return system_residual_impl<DenseAlg>(ws, data, cm, cp, coef.j_minus,
                                        coef.k_minus, coef.j_plus,
                                        coef.k_plus);
}

double dstar_inverse_norm(const ResolventWorkspace& ws) {
  if (ws.path == Path::spectral) return ws.spec->dstar_inv.abs().maxCoeff();
  return ws.dense->dstar_inv.jacobiSvd().singularValues()(0);
}

double det_identity_residual(const ResolventWorkspace& ws) {
  if (ws.path == Path::spectral) {
    const auto& pd = *ws.spec;
    const ArrayXcd dstar =
        1.0 - ws.q_plus * (pd.inv_b_plus * (1.0 - pd.prop_2L) * pd.inv_plus_2L) -
        ws.q_minus * (pd.inv_b_minus * (1.0 - pd.prop_2ell) * pd.inv_plus_2ell);
    const ArrayXcd d = (1.0 + pd.prop_2ell) * (1.0 + pd.prop_2L) * dstar;
    const ArrayXcd dinv = pd.dstar_inv * pd.inv_plus_2L * pd.inv_plus_2ell;
    return ((d * dinv) - 1.0).abs().maxCoeff();
  }
  const auto& pd = *ws.dense;
  const Eigen::Index n = pd.dstar_inv.rows();
  const MatrixXcd ident = MatrixXcd::Identity(n, n);
  const MatrixXcd dstar =
      ident - ws.q_plus * pd.inv_b_plus * (ident - pd.prop_2L) * pd.inv_plus_2L -
      ws.q_minus * pd.inv_b_minus * (ident - pd.prop_2ell) * pd.inv_plus_2ell;
  const MatrixXcd d = (ident + pd.prop_2ell) * (ident + pd.prop_2L) * dstar;
  const MatrixXcd dinv = pd.dstar_inv * pd.inv_plus_2L * pd.inv_plus_2ell;
  return (d * dinv - ident).cwiseAbs().maxCoeff();
}

}  // namespace semiperm::transmission
