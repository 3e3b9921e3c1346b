/*
 * sweep.hpp — resolvent-norm sweeps over the sector, the sharp-estimate
 * scans behind the lambda-uniform bounds, and analytic-semigroup evolution
 * by contour quadrature.
 *
 * The certified estimate is ||(S - lambda)^{-1}|| <= C / |lambda| on
 * S_{pi-eps0}: sweeps record |lambda| * norm ("scaled"), a sector constant
 * C_hat = max scaled, and per-ray log-log slopes (expected ~ -1).
 *
 * p2 norms come from power iteration on R* R; the adjoint of the resolvent
 * with respect to the weighted l2 inner product is the resolvent at
 * conj(lambda) (conj . R(lambda) . conj), so each iteration is two pipeline
 * applications.  p1 / pinf norms are random-sign lower bounds and are
 * flagged as such.
 *
 * The semigroup is evaluated along the hyperbola
 *
 *   lambda(theta) = mu (1 - sin(beta + i theta)),   |theta| <= theta_max,
 *
 * with the trapezoid rule; nodes are conjugate-symmetric and must stay
 * inside S_{pi-eps0} (beta < pi/2 - eps0).  Resolvent applications at the
 * nodes are cached, so evaluation at several times t in the validity window
 * reuses them.
 */

#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "semiperm/grid.hpp"
#include "semiperm/transmission.hpp"

namespace semiperm::sweep {

using cd = std::complex<double>;
using grid::GridFunction;
using grid::HabitatConfig;
using grid::NormKind;

struct SweepRecord {
  cd lambda;
  NormKind norm_kind = NormKind::p2;
  double norm_estimate = 0.0;
  double scaled = 0.0;     // |lambda| * norm_estimate
  bool two_sided = true;   // false for the p1/pinf lower bounds
  int iterations = 0;
  double wall_time_ms = 0.0;
};

SweepRecord resolvent_norm(const HabitatConfig& cfg, cd lambda, double epsilon0,
                           NormKind kind, uint64_t seed = 1234);

// 3 rays (arg = 0 and +-(pi - eps0 - 0.01)) x n_radii log radii, plus 0.
std::vector<cd> sweep_lambda_grid(double epsilon0, double r_min = 1.0,
                                  double r_max = 1e6, int n_radii = 13);

struct SectorFit {
  double c_hat = 0.0;  // max scaled over nonzero-lambda records
  std::vector<double> ray_angles;
  std::vector<double> ray_slopes;
};

// Per-ray least-squares slope of log(norm) against log|lambda|.  Requires at
// least 3 rays and 3 decades of radius per ray.
SectorFit fit_sector_constant(const std::vector<SweepRecord>& records);

struct ScanRecord {
  double ratio;  // max over random g of ||K g|| / ||g||, one-sided p2 norms
  double bound;  // sqrt(d) / sqrt(|lambda + r| + d) for the scanned side
};

// ||int e^{|x-t|B} g(t) dt|| against the lambda-uniform bound.
ScanRecord convolution_norm_scan(const HabitatConfig& cfg, cd lambda,
                                 double epsilon0, transmission::Side side,
                                 int n_vectors = 32, uint64_t seed = 99);

// The eight boundary-term maps e^{phi(.) B} int e^{psi(t) B} g(t) dt; each
// record is the empirical ratio and the same sqrt bound for its side
// (maps 1-4 on the minus side, 5-8 on the plus side).
std::array<ScanRecord, 8> boundary_term_scan(const HabitatConfig& cfg,
                                             cd lambda, double epsilon0,
                                             int n_vectors = 32,
                                             uint64_t seed = 99);

struct ContourSpec {
  double mu = 10.0;     // hyperbola scale
  double beta = 1.05;   // asymptotic half-angle parameter, < pi/2 - eps0
  int n_nodes = 64;     // even
  double t_min = 0.05;  // validity window
  double t_max = 0.5;

  void validate(double epsilon0) const;
};

class SemigroupEvaluator {
 public:
  SemigroupEvaluator(const HabitatConfig& cfg, const ContourSpec& contour,
                     double epsilon0, const GridFunction& u0);

  // e^{tS} u0; t outside [t_min, t_max] is a domain error.
  GridFunction at(double t) const;

 private:
  HabitatConfig cfg_;
  ContourSpec contour_;
  std::vector<cd> lambda_;   // nodes with theta > 0
  std::vector<cd> dlambda_;  // lambda'(theta) h / (2 pi i) at those nodes
  std::vector<GridFunction> y_;       // R(lambda_j) u0
  std::vector<GridFunction> y_conj_;  // R(conj lambda_j) u0
};

GridFunction semigroup_apply(const HabitatConfig& cfg,
                             const ContourSpec& contour, double epsilon0,
                             double t, const GridFunction& u0);

}  // namespace semiperm::sweep
