#include "semiperm/sweep.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

#include "semiperm/complex_geometry.hpp"

namespace semiperm::sweep {

namespace {

constexpr double kPi = 3.14159265358979323846;

using transmission::apply_resolvent;
using transmission::assemble_workspace;
using transmission::ResolventWorkspace;

GridFunction random_grid(const HabitatConfig& cfg, std::mt19937_64& rng,
                         bool signs_only) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  GridFunction g = GridFunction::zero(cfg);
  auto fill = [&](Eigen::MatrixXcd& m) {
    for (Eigen::Index j = 0; j < m.rows(); ++j)
      for (Eigen::Index i = 0; i < m.cols(); ++i) {
        if (signs_only)
          m(j, i) = unit(rng) >= 0.0 ? 1.0 : -1.0;
        else
          m(j, i) = cd(unit(rng), unit(rng));
      }
  };
  fill(g.minus);
  fill(g.plus);
  return g;
}

}  // namespace

SweepRecord resolvent_norm(const HabitatConfig& cfg, cd lambda, double epsilon0,
                           NormKind kind, uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.lambda = lambda;
  rec.norm_kind = kind;

  const ResolventWorkspace ws = assemble_workspace(cfg, lambda, epsilon0);
  std::mt19937_64 rng(seed);

  if (kind == NormKind::p2) {
    // power iteration on R* R; R* = conj . R(lambda) . conj is exact for the
    // weighted inner product because the underlying operator is real
    // symmetric in it.
    GridFunction u = random_grid(cfg, rng, false);
    const double nu0 = grid::norm(u, cfg, NormKind::p2);
    u = (cd(1.0 / nu0, 0.0)) * u;
    double sigma2 = 0.0;
    int it = 0;
    for (; it < 500; ++it) {
      const GridFunction y = apply_resolvent(ws, u);
      const double yn = grid::norm(y, cfg, NormKind::p2);
      const double sigma2_new = yn * yn;  // ||R u||^2 with ||u|| = 1
      GridFunction z = grid::conj(apply_resolvent(ws, grid::conj(y)));
      const double zn = grid::norm(z, cfg, NormKind::p2);
      if (!(zn > 0.0))
        throw std::runtime_error("resolvent_norm: power iteration collapsed");
      u = cd(1.0 / zn, 0.0) * z;
      const bool settled =
          it > 0 && std::abs(sigma2_new - sigma2) <= 1e-4 * sigma2_new;
      sigma2 = sigma2_new;
      if (settled) break;
    }
    if (it >= 500)
      throw std::runtime_error(
          "resolvent_norm: power iteration did not stabilize in 500 steps");
    rec.norm_estimate = std::sqrt(sigma2);
    rec.iterations = it + 1;
    rec.two_sided = true;
  } else {
    double best = 0.0;
    for (int k = 0; k < 64; ++k) {
      const GridFunction g = random_grid(cfg, rng, true);
      const GridFunction y = apply_resolvent(ws, g);
      best = std::max(best, grid::norm(y, cfg, kind) / grid::norm(g, cfg, kind));
    }
    rec.norm_estimate = best;
    rec.iterations = 64;
    rec.two_sided = false;  // lower bound only
  }
  rec.scaled = std::abs(lambda) * rec.norm_estimate;
  rec.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  return rec;
}

std::vector<cd> sweep_lambda_grid(double epsilon0, double r_min, double r_max,
                                  int n_radii) {
  std::vector<cd> out;
  out.push_back(cd(0.0, 0.0));
  const double ray = kPi - epsilon0 - 0.01;
  for (const double a : {0.0, ray, -ray})
    for (int j = 0; j < n_radii; ++j) {
      const double r = std::exp(std::log(r_min) + (std::log(r_max) - std::log(r_min)) *
                                                      j / double(n_radii - 1));
      out.push_back(std::polar(r, a));
    }
  return out;
}

SectorFit fit_sector_constant(const std::vector<SweepRecord>& records) {
  struct Ray {
    double angle;
    std::vector<double> logr, lognorm;
  };
  std::vector<Ray> rays;
  SectorFit fit;
  for (const SweepRecord& r : records) {
    if (r.lambda == cd(0.0, 0.0)) continue;
    fit.c_hat = std::max(fit.c_hat, r.scaled);
    const double a = sector::principal_arg(r.lambda);
    Ray* ray = nullptr;
    for (Ray& cand : rays)
      if (std::abs(cand.angle - a) < 1e-9) ray = &cand;
    if (!ray) {
      rays.push_back({a, {}, {}});
      ray = &rays.back();
    }
    ray->logr.push_back(std::log10(std::abs(r.lambda)));
    ray->lognorm.push_back(std::log10(r.norm_estimate));
  }
  if (rays.size() < 3)
    throw std::domain_error("fit_sector_constant: need at least 3 rays");
  for (const Ray& ray : rays) {
    const size_t n = ray.logr.size();
    if (n < 2)
      throw std::domain_error("fit_sector_constant: ray with < 2 samples");
    const double span = *std::max_element(ray.logr.begin(), ray.logr.end()) -
                        *std::min_element(ray.logr.begin(), ray.logr.end());
    if (span < 3.0)
      throw std::domain_error(
          "fit_sector_constant: need >= 3 decades of |lambda| per ray");
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
      mx += ray.logr[i];
      my += ray.lognorm[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxy = 0.0, sxx = 0.0;
    for (size_t i = 0; i < n; ++i) {
      sxy += (ray.logr[i] - mx) * (ray.lognorm[i] - my);
      sxx += (ray.logr[i] - mx) * (ray.logr[i] - mx);
    }
    fit.ray_angles.push_back(ray.angle);
    fit.ray_slopes.push_back(sxy / sxx);
  }
  return fit;
}

namespace {

double side_norm_p2(const Eigen::MatrixXcd& m, double dx, double h) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < m.rows(); ++j) {
    const double w = dx * ((j == 0 || j == m.rows() - 1) ? 0.5 : 1.0) * h;
    acc += w * m.row(j).squaredNorm();
  }
  return std::sqrt(acc);
}

Eigen::MatrixXcd random_side(Eigen::Index rows, Eigen::Index cols,
                             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::MatrixXcd g(rows, cols);
  for (Eigen::Index j = 0; j < rows; ++j)
    for (Eigen::Index i = 0; i < cols; ++i) g(j, i) = cd(unit(rng), unit(rng));
  return g;
}

}  // namespace

ScanRecord convolution_norm_scan(const HabitatConfig& cfg, cd lambda,
                                 double epsilon0, transmission::Side side,
                                 int n_iterations, uint64_t seed) {
  // ||U|| by power iteration; the kernel e^{|x-t|B} is symmetric, so the
  // adjoint of U(lambda) in the weighted inner product is U(conj lambda) =
  // conj . U(lambda) . conj, exactly as for the resolvent.
  const ResolventWorkspace ws = assemble_workspace(cfg, lambda, epsilon0);
  const bool minus = side == transmission::Side::minus;
  const double d = minus ? cfg.d_minus : cfg.d_plus;
  const double r = minus ? cfg.r_minus : cfg.r_plus;
  const double dx = minus ? cfg.dx_minus() : cfg.dx_plus();
  const Eigen::Index rows = minus ? cfg.n_long_minus : cfg.n_long_plus;

  std::mt19937_64 rng(seed);
  Eigen::MatrixXcd u = random_side(rows, cfg.n_transversal, rng);
  u /= side_norm_p2(u, dx, cfg.h());
  double sigma = 0.0;
  for (int it = 0; it < std::max(8, n_iterations); ++it) {
    const Eigen::MatrixXcd y = transmission::apply_abs_kernel(ws, side, u);
    const double yn = side_norm_p2(y, dx, cfg.h());
    Eigen::MatrixXcd z =
        transmission::apply_abs_kernel(ws, side, y.conjugate()).conjugate();
    const double zn = side_norm_p2(z, dx, cfg.h());
    const bool settled = it > 2 && std::abs(yn - sigma) <= 1e-6 * yn;
    sigma = yn;
    u = z / zn;
    if (settled) break;
  }
  ScanRecord rec;
  rec.ratio = sigma;
  rec.bound = std::sqrt(d) / std::sqrt(std::abs(lambda + r) + d);
  return rec;
}

std::array<ScanRecord, 8> boundary_term_scan(const HabitatConfig& cfg,
                                             cd lambda, double epsilon0,
                                             int /*n_vectors*/,
                                             uint64_t /*seed*/) {
  // Each map factors per cross-section mode as (node propagator column) x
  // (kernel-integral functional), so its operator norm is exact:
  //   max_k ||e^{phi(.) b_k}||_w  sup_g |J_k(g)| / ||g||_w,
  // with the functional's dual norm read off its quadrature coefficients.
  using transmission::PropagatorFamily;
  using transmission::Side;
  const ResolventWorkspace ws = assemble_workspace(cfg, lambda, epsilon0);
  const int n = cfg.n_transversal;
  const double bm = std::sqrt(cfg.d_minus) /
                    std::sqrt(std::abs(lambda + cfg.r_minus) + cfg.d_minus);
  const double bp = std::sqrt(cfg.d_plus) /
                    std::sqrt(std::abs(lambda + cfg.r_plus) + cfg.d_plus);

  // quadrature coefficient rows of the four kernel integrals, assembled by
  // unit probes, in cross-section eigencoordinates
  auto functional_rows = [&](Side side, bool left_kernel) {
    const bool minus = side == Side::minus;
    const int rows = minus ? cfg.n_long_minus : cfg.n_long_plus;
    // probe node j with the field whose eigencoordinates are all ones, so
    // the recovered coefficients are the per-mode quadrature weights
    const Eigen::VectorXd ones_probe = ws.basis.rowwise().sum();
    Eigen::MatrixXcd r(n, rows);
    for (int j = 0; j < rows; ++j) {
      Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(rows, n);
      e.row(j) = ones_probe.transpose().cast<cd>();
      const auto conv = transmission::convolve_v(ws, side, e);
      r.col(j) = ws.basis.transpose() *
                 (left_kernel ? conv.j_left : conv.j_right);
    }
    return r;
  };

  auto dual_norms = [&](const Eigen::MatrixXcd& r, double dx) {
    Eigen::VectorXd out(n);
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j < r.cols(); ++j) {
        const double w = dx * ((j == 0 || j == r.cols() - 1) ? 0.5 : 1.0);
        acc += std::norm(r(k, j)) / w;
      }
      out[k] = std::sqrt(acc);
    }
    return out;
  };

  auto column_norms = [&](const std::vector<Eigen::ArrayXcd>& tab, double dx) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (size_t j = 0; j < tab.size(); ++j) {
      const double w = dx * ((j == 0 || j + 1 == tab.size()) ? 0.5 : 1.0);
      for (int k = 0; k < n; ++k) out[k] += w * std::norm(tab[j][k]);
    }
    return out.cwiseSqrt().eval();
  };

  // probes assume one workspace path; the scan runs on the spectral path
  const auto& pd = *ws.spec;
  const double dxm = cfg.dx_minus(), dxp = cfg.dx_plus();
  const Eigen::MatrixXcd jm_left = functional_rows(Side::minus, true);
  const Eigen::MatrixXcd jm_right = functional_rows(Side::minus, false);
  const Eigen::MatrixXcd jp_left = functional_rows(Side::plus, true);
  const Eigen::MatrixXcd jp_right = functional_rows(Side::plus, false);
  const Eigen::VectorXd dm_left = dual_norms(jm_left, dxm);
  const Eigen::VectorXd dm_right = dual_norms(jm_right, dxm);
  const Eigen::VectorXd dp_left = dual_norms(jp_left, dxp);
  const Eigen::VectorXd dp_right = dual_norms(jp_right, dxp);
  const Eigen::VectorXd cm_left = column_norms(pd.pm_left, dxm);
  const Eigen::VectorXd cm_right = column_norms(pd.pm_right, dxm);
  const Eigen::VectorXd cp_left = column_norms(pd.pp_left, dxp);
  const Eigen::VectorXd cp_right = column_norms(pd.pp_right, dxp);

  const struct {
    const Eigen::VectorXd* col;
    const Eigen::VectorXd* dual;
    bool minus_side;
  } maps[8] = {
      {&cm_left, &dm_right, true},   // e^{(.+ell)B-} int e^{(t+ell)B-}
      {&cm_left, &dm_left, true},    // e^{(.+ell)B-} int e^{-tB-}
      {&cm_right, &dm_left, true},   // e^{-.B-} int e^{-tB-}
      {&cm_right, &dm_right, true},  // e^{-.B-} int e^{(t+ell)B-}
      {&cp_left, &dp_right, false},  // e^{.B+} int e^{tB+}
      {&cp_left, &dp_left, false},   // e^{.B+} int e^{(L-t)B+}
      {&cp_right, &dp_left, false},  // e^{(L-.)B+} int e^{(L-t)B+}
      {&cp_right, &dp_right, false}, // e^{(L-.)B+} int e^{tB+}
  };
  std::array<ScanRecord, 8> out;
  for (int m = 0; m < 8; ++m) {
    out[m].ratio = (maps[m].col->array() * maps[m].dual->array()).maxCoeff();
    out[m].bound = maps[m].minus_side ? bm : bp;
  }
  return out;
}

// ---------------------------------------------------------------------------

void ContourSpec::validate(double epsilon0) const {
  if (!(mu > 0.0))
    throw std::invalid_argument("ContourSpec: field mu must be > 0");
  if (!(beta > 0.0 && beta < kPi / 2 - epsilon0))
    throw std::invalid_argument(
        "ContourSpec: field beta must lie in (0, pi/2 - eps0)");
  if (n_nodes < 4 || n_nodes % 2 != 0)
    throw std::invalid_argument("ContourSpec: field n_nodes must be even, >= 4");
  if (!(t_min > 0.0 && t_min < t_max))
    throw std::invalid_argument("ContourSpec: need 0 < t_min < t_max");
}

SemigroupEvaluator::SemigroupEvaluator(const HabitatConfig& cfg,
                                       const ContourSpec& contour,
                                       double epsilon0, const GridFunction& u0)
    : cfg_(cfg), contour_(contour) {
  contour.validate(epsilon0);
  u0.check_shape(cfg);

  // truncation: |e^{t lambda}| at the endpoints below ~1e-16 for t >= t_min
  const double theta_max = std::acosh(
      (1.0 + 37.0 / (contour.t_min * contour.mu)) / std::sin(contour.beta));
  const int n = contour.n_nodes;
  const double h = 2.0 * theta_max / (n - 1);

  for (int j = 0; j < n; ++j) {
    const double theta = -theta_max + j * h;
    if (theta <= 0.0) continue;  // conjugate-symmetric half
    const cd arg = cd(contour.beta, theta);
    const cd lam = contour.mu * (1.0 - std::sin(arg));
    if (!sector::in_sector(lam, kPi - epsilon0))
      throw std::invalid_argument(
          "ContourSpec: contour node outside S_{pi-eps0}");
    const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
    const cd dl = -cd(0.0, 1.0) * contour.mu * std::cos(arg);  // lambda'(theta)
    lambda_.push_back(lam);
    // coefficient w lambda' e^{lambda t} / (2 pi i) against (S - lambda)^{-1}:
    // theta descends the standard upward contour, and the resolvent sign
    // flips once more, so the two reversals cancel.
    dlambda_.push_back(w * dl / (2.0 * kPi * cd(0.0, 1.0)));
  }

  for (size_t j = 0; j < lambda_.size(); ++j) {
    const auto ws = assemble_workspace(cfg, lambda_[j], epsilon0);
    y_.push_back(apply_resolvent(ws, u0));
    // R(conj lambda) u0 = conj(R(lambda) conj(u0))
    y_conj_.push_back(grid::conj(apply_resolvent(ws, grid::conj(u0))));
  }
}

GridFunction SemigroupEvaluator::at(double t) const {
  if (!(t >= contour_.t_min && t <= contour_.t_max))
    throw std::domain_error(
        "SemigroupEvaluator: t outside the contour validity window");
  GridFunction acc = GridFunction::zero(cfg_);
  for (size_t j = 0; j < lambda_.size(); ++j) {
    const cd c = dlambda_[j] * std::exp(lambda_[j] * t);
    const cd cc = std::conj(dlambda_[j]) * std::exp(std::conj(lambda_[j]) * t);
    acc = acc + c * y_[j] + cc * y_conj_[j];
  }
  return acc;
}

GridFunction semigroup_apply(const HabitatConfig& cfg,
                             const ContourSpec& contour, double epsilon0,
                             double t, const GridFunction& u0) {
  return SemigroupEvaluator(cfg, contour, epsilon0, u0).at(t);
}

}  // namespace semiperm::sweep
