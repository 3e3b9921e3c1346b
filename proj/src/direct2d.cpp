#include "semiperm/direct2d.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace semiperm::direct2d {

Direct2DOperator build_2d_operator(const HabitatConfig& cfg) {
  cfg.validate();
  Direct2DOperator op;
  op.cfg = cfg;
  op.n_minus_interior = cfg.n_long_minus - 2;
  op.n_plus_interior = cfg.n_long_plus - 2;
  const int n = cfg.n_transversal;
  const double h2 = cfg.h() * cfg.h();
  const double dxm = cfg.dx_minus(), dxp = cfg.dx_plus();
  const double dxm2 = dxm * dxm, dxp2 = dxp * dxp;

  // interface elimination: (c- + q) a - q b = R-,  -q a + (c+ + q) b = R+
  const double cm = 3.0 * cfg.d_minus / (2.0 * dxm);
  const double cp = 3.0 * cfg.d_plus / (2.0 * dxp);
  const double det = (cm + cfg.q) * (cp + cfg.q) - cfg.q * cfg.q;
  const double rm1 = 2.0 * cfg.d_minus / dxm;        // R- coefficient of u-(M-1)
  const double rm2 = -cfg.d_minus / (2.0 * dxm);     // ... of u-(M-2)
  const double rp1 = 2.0 * cfg.d_plus / dxp;         // R+ coefficient of u+(1)
  const double rp2 = -cfg.d_plus / (2.0 * dxp);      // ... of u+(2)
  op.a_coef[0] = (cp + cfg.q) * rm1 / det;
  op.a_coef[1] = (cp + cfg.q) * rm2 / det;
  op.a_coef[2] = cfg.q * rp1 / det;
  op.a_coef[3] = cfg.q * rp2 / det;
  op.b_coef[0] = cfg.q * rm1 / det;
  op.b_coef[1] = cfg.q * rm2 / det;
  op.b_coef[2] = (cm + cfg.q) * rp1 / det;
  op.b_coef[3] = (cm + cfg.q) * rp2 / det;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(op.size()) * 8);

  auto add = [&](int row, int col, double v) { trip.emplace_back(row, col, v); };

  // the four interior unknowns feeding each interface trace
  auto trace_targets = [&](int i) {
    return std::array<int, 4>{op.index_minus(op.n_minus_interior, i),
                              op.index_minus(op.n_minus_interior - 1, i),
                              op.index_plus(1, i), op.index_plus(2, i)};
  };

  for (int i = 0; i < n; ++i) {
    // cross-section stencil is shared by every longitudinal node
    for (int j = 1; j <= op.n_minus_interior; ++j) {
      const int row = op.index_minus(j, i);
      const double d = cfg.d_minus;
      add(row, row, -2.0 * d / dxm2 - 2.0 * d / h2 - cfg.r_minus);
      if (i > 0) add(row, op.index_minus(j, i - 1), d / h2);
      if (i + 1 < n) add(row, op.index_minus(j, i + 1), d / h2);
      if (j > 1) add(row, op.index_minus(j - 1, i), d / dxm2);
      if (j < op.n_minus_interior) add(row, op.index_minus(j + 1, i), d / dxm2);
      if (j == op.n_minus_interior) {
        // neighbour at x = 0 is the eliminated trace w-(0)
        const auto t = trace_targets(i);
        for (int c = 0; c < 4; ++c) add(row, t[c], d / dxm2 * op.a_coef[c]);
      }
    }
    for (int j = 1; j <= op.n_plus_interior; ++j) {
      const int row = op.index_plus(j, i);
      const double d = cfg.d_plus;
      add(row, row, -2.0 * d / dxp2 - 2.0 * d / h2 - cfg.r_plus);
      if (i > 0) add(row, op.index_plus(j, i - 1), d / h2);
      if (i + 1 < n) add(row, op.index_plus(j, i + 1), d / h2);
      if (j > 1) add(row, op.index_plus(j - 1, i), d / dxp2);
      if (j < op.n_plus_interior) add(row, op.index_plus(j + 1, i), d / dxp2);
      if (j == 1) {
        // neighbour at x = 0 is the eliminated trace w+(0)
        const auto t = trace_targets(i);
        for (int c = 0; c < 4; ++c) add(row, t[c], d / dxp2 * op.b_coef[c]);
      }
    }
  }
  op.matrix.resize(op.size(), op.size());
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  return op;
}

VectorXcd Direct2DOperator::restrict_interior(const GridFunction& f) const {
  f.check_shape(cfg);
  VectorXcd u(size());
  for (int i = 0; i < cfg.n_transversal; ++i) {
    for (int j = 1; j <= n_minus_interior; ++j)
      u[index_minus(j, i)] = f.minus(j, i);
    for (int j = 1; j <= n_plus_interior; ++j)
      u[index_plus(j, i)] = f.plus(j, i);
  }
  return u;
}

GridFunction Direct2DOperator::extend_with_traces(const VectorXcd& u) const {
  GridFunction w = GridFunction::zero(cfg);
  for (int i = 0; i < cfg.n_transversal; ++i) {
    for (int j = 1; j <= n_minus_interior; ++j)
      w.minus(j, i) = u[index_minus(j, i)];
    for (int j = 1; j <= n_plus_interior; ++j)
      w.plus(j, i) = u[index_plus(j, i)];
    const cd um1 = u[index_minus(n_minus_interior, i)];
    const cd um2 = u[index_minus(n_minus_interior - 1, i)];
    const cd up1 = u[index_plus(1, i)];
    const cd up2 = u[index_plus(2, i)];
    w.minus(cfg.n_long_minus - 1, i) =
        a_coef[0] * um1 + a_coef[1] * um2 + a_coef[2] * up1 + a_coef[3] * up2;
    w.plus(0, i) =
        b_coef[0] * um1 + b_coef[1] * um2 + b_coef[2] * up1 + b_coef[3] * up2;
  }
  return w;
}

DirectResolventSolver::DirectResolventSolver(const Direct2DOperator& op,
                                             cd lambda)
    : op_(op), lambda_(lambda) {
  shifted_ = op.matrix.cast<cd>();
  for (int k = 0; k < shifted_.outerSize(); ++k)
    shifted_.coeffRef(k, k) -= lambda;
  shifted_.makeCompressed();
  lu_.compute(shifted_);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error(
        "DirectResolventSolver: sparse factorization failed");
}

GridFunction DirectResolventSolver::solve(const GridFunction& f) const {
  const VectorXcd rhs = op_.restrict_interior(f);
  const VectorXcd u = lu_.solve(rhs);
  last_residual_ = (shifted_ * u - rhs).norm();
  const double fn = rhs.norm();
  if (fn > 0.0 && last_residual_ > 1e-10 * fn)
    throw std::runtime_error(
        "direct_resolvent_solve: residual exceeds 1e-10 ||f||; condition-"
        "limited solve");
  return op_.extend_with_traces(u);
}

GridFunction direct_resolvent_solve(const Direct2DOperator& op, cd lambda,
                                    const GridFunction& f) {
  return DirectResolventSolver(op, lambda).solve(f);
}

CrankNicolson::CrankNicolson(const Direct2DOperator& op, double dt)
    : op_(op), dt_(dt) {
  if (!(dt > 0.0)) throw std::domain_error("CrankNicolson: dt must be > 0");
  if (dt > 1e-2)
    throw std::domain_error("CrankNicolson: accuracy guard requires dt <= 1e-2");
  Eigen::SparseMatrix<double> ident(op.size(), op.size());
  ident.setIdentity();
  const Eigen::SparseMatrix<double> backward = ident - (dt / 2.0) * op.matrix;
  forward_ = ident + (dt / 2.0) * op.matrix;
  lu_.compute(backward);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("CrankNicolson: factorization failed");
}

GridFunction CrankNicolson::advance(const GridFunction& u0, int n_steps) const {
  VectorXcd u = op_.restrict_interior(u0);
  VectorXd ur = u.real(), ui = u.imag();
  for (int s = 0; s < n_steps; ++s) {
    ur = lu_.solve((forward_ * ur).eval());
    ui = lu_.solve((forward_ * ui).eval());
  }
  u.real() = ur;
  u.imag() = ui;
  return op_.extend_with_traces(u);
}

GridFunction time_step_cn(const Direct2DOperator& op, const GridFunction& u0,
                          double dt, int n_steps) {
  return CrankNicolson(op, dt).advance(u0, n_steps);
}

// ---------------------------------------------------------------------------

namespace {

// 1-D element matrices on a segment of length dx: mass [2,1;1,2] dx/6 and
// stiffness [1,-1;-1,1]/dx.
struct Elem1D {
  double m[2][2];
  double k[2][2];
  explicit Elem1D(double dx) {
    m[0][0] = m[1][1] = dx / 3.0;
    m[0][1] = m[1][0] = dx / 6.0;
    k[0][0] = k[1][1] = 1.0 / dx;
    k[0][1] = k[1][0] = -1.0 / dx;
  }
};

}  // namespace

double weak_residual(const Direct2DOperator& op, const GridFunction& u,
                     const GridFunction& g) {
  const HabitatConfig& cfg = op.cfg;
  u.check_shape(cfg);
  g.check_shape(cfg);
  const int n = cfg.n_transversal;

  // residual accumulators at every stored node (tensor hats); outer Dirichlet
  // columns x = -ell, x = L carry no test function.
  MatrixXcd rm = MatrixXcd::Zero(cfg.n_long_minus, n);
  MatrixXcd rp = MatrixXcd::Zero(cfg.n_long_plus, n);

  auto accumulate_side = [&](const MatrixXcd& uu, const MatrixXcd& gg,
                             MatrixXcd& rr, double dx, double d, double r,
                             int n_long) {
    const Elem1D ex(dx);
    const Elem1D ey(cfg.h());
    // value at (x node jj, y level ii) with Dirichlet padding in y
    auto val = [&](const MatrixXcd& m, int jj, int ii) -> cd {
      if (ii < 0 || ii >= n) return cd(0.0, 0.0);
      return m(jj, ii);
    };
    for (int j = 0; j + 1 < n_long; ++j) {
      for (int iy = 0; iy <= n; ++iy) {  // cell between y levels iy-1..? use corners iy-1,iy
        // corners: (j, iy-1), (j+1, iy-1), (j, iy), (j+1, iy) in (x,y)
        const cd uc[4] = {val(uu, j, iy - 1), val(uu, j + 1, iy - 1),
                          val(uu, j, iy), val(uu, j + 1, iy)};
        const cd gc[4] = {val(gg, j, iy - 1), val(gg, j + 1, iy - 1),
                          val(gg, j, iy), val(gg, j + 1, iy)};
        // local index: c = ix + 2*iyloc, ix in {0,1} (x), iyloc in {0,1} (y)
        for (int c_test = 0; c_test < 4; ++c_test) {
          const int tx = c_test & 1, ty = c_test >> 1;
          const int node_j = j + tx;
          const int node_i = iy - 1 + ty;
          if (node_i < 0 || node_i >= n) continue;  // y boundary: no hat
          cd acc(0.0, 0.0);
          for (int c = 0; c < 4; ++c) {
            const int cx = c & 1, cy = c >> 1;
            const double stiff =
                ex.k[tx][cx] * ey.m[ty][cy] + ex.m[tx][cx] * ey.k[ty][cy];
            const double mass = ex.m[tx][cx] * ey.m[ty][cy];
            acc += d * stiff * uc[c] + r * mass * uc[c] - mass * gc[c];
          }
          rr(node_j, node_i) += acc;
        }
      }
    }
  };

  accumulate_side(u.minus, g.minus, rm, cfg.dx_minus(), cfg.d_minus,
                  cfg.r_minus, cfg.n_long_minus);
  accumulate_side(u.plus, g.plus, rp, cfg.dx_plus(), cfg.d_plus, cfg.r_plus,
                  cfg.n_long_plus);

  // interface form q int (u+ - u-)(w+ - w-) dy along x = 0
  {
    const Elem1D ey(cfg.h());
    const int jm = cfg.n_long_minus - 1;
    auto jumpv = [&](int ii) -> cd {
      if (ii < 0 || ii >= n) return cd(0.0, 0.0);
      return u.plus(0, ii) - u.minus(jm, ii);
    };
    for (int iy = 0; iy <= n; ++iy) {  // y segments with corners iy-1, iy
      const cd j0 = jumpv(iy - 1), j1 = jumpv(iy);
      for (int t = 0; t < 2; ++t) {
        const int node_i = iy - 1 + t;
        if (node_i < 0 || node_i >= n) continue;
        const cd jy = cfg.q * (ey.m[t][0] * j0 + ey.m[t][1] * j1);
        rm(jm, node_i) -= jy;  // (w+ - w-) trace of a minus-side hat is -1
        rp(0, node_i) += jy;
      }
    }
  }

  // residual density: divide by the hat mass; skip outer Dirichlet columns
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j < cfg.n_long_minus; ++j) {
      const double mass =
          cfg.h() * cfg.dx_minus() * (j == cfg.n_long_minus - 1 ? 0.5 : 1.0);
      worst = std::max(worst, std::abs(rm(j, i)) / mass);
    }
    for (int j = 0; j + 1 < cfg.n_long_plus; ++j) {
      const double mass = cfg.h() * cfg.dx_plus() * (j == 0 ? 0.5 : 1.0);
      worst = std::max(worst, std::abs(rp(j, i)) / mass);
    }
  }
  return worst;
}

FluxBalance interface_flux_residual(const HabitatConfig& cfg,
                                    const GridFunction& w) {
  w.check_shape(cfg);
  const int m = cfg.n_long_minus - 1;
  FluxBalance fb{0.0, 0.0};
  for (int i = 0; i < cfg.n_transversal; ++i) {
    const cd jump = w.plus(0, i) - w.minus(m, i);
    const cd dm = (3.0 * w.minus(m, i) - 4.0 * w.minus(m - 1, i) +
                   w.minus(m - 2, i)) /
                  (2.0 * cfg.dx_minus());
    const cd dp = (-3.0 * w.plus(0, i) + 4.0 * w.plus(1, i) - w.plus(2, i)) /
                  (2.0 * cfg.dx_plus());
    fb.minus = std::max(fb.minus, std::abs(cfg.d_minus * dm - cfg.q * jump));
    fb.plus = std::max(fb.plus, std::abs(cfg.d_plus * dp - cfg.q * jump));
  }
  return fb;
}

VectorXcd spectrum(const Direct2DOperator& op) {
  if (op.size() > 4000)
    throw std::domain_error("spectrum: dense eigensolve limited to n <= 4000");
  Eigen::EigenSolver<MatrixXd> es(op.dense(), false);
  return es.eigenvalues();
}

EigenPairs smallest_eigenpairs(const Direct2DOperator& op, int k, int max_iter,
                               double tol) {
  const int n = op.size();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::SparseMatrix<double> m = op.matrix;
  m.makeCompressed();
  lu.compute(m);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("smallest_eigenpairs: factorization failed");

  EigenPairs out;
  out.values.resize(k);
  std::mt19937_64 rng(20240u);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int e = 0; e < k; ++e) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = unit(rng);
    for (const auto& prev : out.vectors) v -= prev.dot(v) * prev;
    v.normalize();
    double nu = 0.0;
    for (int it = 0; it < max_iter; ++it) {
      VectorXd w = lu.solve(v);
      for (const auto& prev : out.vectors) w -= prev.dot(w) * prev;
      w.normalize();
      const double nu_new = w.dot(op.matrix * w);
      const bool done = std::abs(nu_new - nu) <= tol * std::abs(nu_new);
      nu = nu_new;
      v = w;
      if (done && it > 2) break;
    }
    out.values[e] = nu;
    out.vectors.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

// cosh(sqrt(a) s) and sinh(sqrt(a) s)/sqrt(a): even in sqrt(a), hence real
// analytic in a across a = 0 (trigonometric for a < 0).
double cosh_even(double a, double s) {
  if (a >= 0.0) return std::cosh(std::sqrt(a) * s);
  return std::cos(std::sqrt(-a) * s);
}

double sinch(double a, double s) {
  if (a == 0.0) return s;
  if (a > 0.0) {
    const double t = std::sqrt(a);
    return std::sinh(t * s) / t;
  }
  const double t = std::sqrt(-a);
  return std::sin(t * s) / t;
}

// characteristic function of the 1-D mode problem, real for all real nu:
// with C± = cosh_even(a±, len±), St± = sinch(a±, len±), a± = (nu+r±)/d± - mu,
//   char(nu) = (d- C- + q St-)(d+ C+ + q St+) - q^2 St- St+.
double mode_char(const HabitatConfig& cfg, double mu, double nu) {
  const double am = (nu + cfg.r_minus) / cfg.d_minus - mu;
  const double ap = (nu + cfg.r_plus) / cfg.d_plus - mu;
  const double cm = cosh_even(am, cfg.ell), sm = sinch(am, cfg.ell);
  const double cp = cosh_even(ap, cfg.L), sp = sinch(ap, cfg.L);
  return (cfg.d_minus * cm + cfg.q * sm) * (cfg.d_plus * cp + cfg.q * sp) -
         cfg.q * cfg.q * sm * sp;
}

}  // namespace

ModeEigenpair lowest_mode_eigenpair(const HabitatConfig& cfg, double mu) {
  // above nu_max = max(d mu - r) both sides are hyperbolic and the
  // characteristic function is strictly positive, so no roots exist there;
  // the first root below it is the slowest mode
  const double nu_max = std::max(cfg.d_minus * mu - cfg.r_minus,
                                 cfg.d_plus * mu - cfg.r_plus);
  auto fchar = [&](double nu) { return mode_char(cfg, mu, nu); };

  // scan downward for the first sign change; adjacent roots are at least
  // ~ d pi^2/(ell+L)^2 apart, so a fraction of that cannot skip a pair
  const double pi = 3.14159265358979323846;
  const double spacing = std::min(cfg.d_minus, cfg.d_plus) * pi * pi /
                         ((cfg.ell + cfg.L) * (cfg.ell + cfg.L));
  const double step = 0.2 * spacing;
  const double limit =
      nu_max - 400.0 * std::max(cfg.d_minus, cfg.d_plus) *
                   (pi * pi) * (1.0 / (cfg.ell * cfg.ell) + 1.0 / (cfg.L * cfg.L));
  double hi = nu_max - 1e-9 * (1.0 + std::abs(nu_max));
  double fhi = fchar(hi);
  double lo = hi;
  bool bracketed = false;
  while (hi > limit) {
    lo = hi - step;
    const double flo = fchar(lo);
    if (std::signbit(flo) != std::signbit(fhi)) {
      bracketed = true;
      break;
    }
    hi = lo;
    fhi = flo;
  }
  if (!bracketed)
    throw std::runtime_error("lowest_mode_eigenpair: no sign change found");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (std::signbit(fchar(mid)) == std::signbit(fhi)) hi = mid;
    else lo = mid;
    if (hi - lo < 1e-15 * (1.0 + std::abs(mid))) break;
  }
  const double nu = 0.5 * (lo + hi);

  // amplitudes: w-(x) = A sinch(a-, x+ell), w+(x) = C sinch(a+, L-x) with
  // C/A = q St- / (q St+ + d+ C+)
  const double am = (nu + cfg.r_minus) / cfg.d_minus - mu;
  const double ap = (nu + cfg.r_plus) / cfg.d_plus - mu;
  const double stm = sinch(am, cfg.ell);
  const double stp = sinch(ap, cfg.L), chp = cosh_even(ap, cfg.L);
  const double c_over_a = cfg.q * stm / (cfg.q * stp + cfg.d_plus * chp);

  ModeEigenpair out;
  out.nu = nu;
  out.minus.resize(cfg.n_long_minus);
  out.plus.resize(cfg.n_long_plus);
  for (int j = 0; j < cfg.n_long_minus; ++j)
    out.minus[j] = sinch(am, cfg.x_minus(j) + cfg.ell);
  for (int j = 0; j < cfg.n_long_plus; ++j)
    out.plus[j] = c_over_a * sinch(ap, cfg.L - cfg.x_plus(j));
  const double peak = std::max(out.minus.cwiseAbs().maxCoeff(),
                               out.plus.cwiseAbs().maxCoeff());
  out.minus /= peak;
  out.plus /= peak;
  return out;
}

}  // namespace semiperm::direct2d
