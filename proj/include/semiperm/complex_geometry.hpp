/*
 * complex_geometry.hpp — scalar complex-plane geometry for sectorial
 * resolvent analysis.
 *
 * Provides the principal-argument identities and inequalities used to
 * control the interface-determinant symbol
 *
 *   f(z) = 1 + q+ (1 - e^{-2L sqrt(z+l+ + r+)}) / (sqrt(z+l+ + r+) (1 + e^{-2L sqrt(...)}))
 *            + q- (1 - e^{-2l sqrt(z+l- + r-)}) / (sqrt(z+l- + r-) (1 + e^{-2l sqrt(...)})),
 *
 * together with a sampled certification of the sector lower bound
 * |f(z)| > sin(eps0/2) on z in S_{eps0}, lambda in S_{pi-eps0} u {0}.
 *
 * Conventions: principal branch everywhere — arg in (-pi, pi], sqrt maps
 * into Re >= 0.  All strict inequalities are checked with a fixed absolute
 * slack of 1e-12 to absorb rounding near equality cases.
 */

#pragma once

#include <complex>
#include <optional>
#include <stdexcept>
#include <vector>

namespace semiperm::sector {

using cd = std::complex<double>;

inline constexpr double kSlack = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

// Principal argument in (-pi, pi].  For z off the real axis it agrees with
// 2 atan(Im z / (Re z + |z|)) to machine precision.
double principal_arg(cd z);

// True iff z lies in the open sector S_omega = { |arg z| < omega }, z != 0.
// S_0 degenerates to the positive real axis.
bool in_sector(cd z, double omega);

// True iff z in S_omega u {0}.
bool in_sector_or_zero(cd z, double omega);

// Chain 0 < |arg(z+c)| < |arg z| < pi for c > 0 (reversed inner inequality
// for c < 0), checked with slack.  Requires z not real, c != 0, z+c != 0.
bool shift_monotonicity_holds(cd z, double c);

enum class SandwichOutcome { holds, violated, hypothesis_not_met };

// arg(z1) <= arg(z1+z2) <= arg(z2) under the half-plane ordering hypothesis:
//   arg(z2) in [0, pi]:  arg(-z2) <= arg(z1) <= arg(z2)
//   arg(z2) in [-pi, 0]: -pi      <= arg(z1) <= arg(z2).
// Returns hypothesis_not_met when the hypothesis fails.  z1+z2 = 0 is a
// domain error.
SandwichOutcome sum_arg_sandwich(cd z1, cd z2);

struct ModulusBound {
  double lhs;  // |z1+z2|
  double rhs;  // (|z1|+|z2|) |cos((arg z1 - arg z2)/2)|
};

// Half-angle lower bound |z1+z2| >= (|z1|+|z2|) |cos((arg z1 - arg z2)/2)|.
ModulusBound sum_modulus_lower_bound(cd z1, cd z2);

struct ExpBracketBounds {
  double arg_gap;         // |arg(1-e^{-z}) - arg(1+e^{-z})|, must be < alpha
  double one_plus_floor;  // 1 - e^{-pi/(2 tan alpha)}  <= |1+e^{-z}|
  double one_minus_lo;    // |z| cos(alpha) / (1 + |z| cos(alpha)) <= |1-e^{-z}|
  double one_minus_hi;    // |1-e^{-z}| <= 2|z| / (1 + |z| cos(alpha))
};

// The four quantities controlling 1 -+ e^{-z} for z in S_alpha,
// 0 < alpha < pi/2.  z outside S_alpha is a domain error.
ExpBracketBounds exp_bracket_bounds(cd z, double alpha);

// All three bracket estimates hold for (z, alpha), with slack.
bool exp_bracket_holds(cd z, double alpha);

// Signed gap arg(1-e^{-z}) - arg(1+e^{-z}) for z != 0 with |Im z| <= pi and
// arg z in [-beta, alpha-beta) (case 1) or (-alpha+beta, beta] (case 2).
// The gap lies in [-beta, alpha-beta) resp. (-alpha+beta, beta].
// |Im z| > pi or arg z outside both case ranges is a domain error.
double refined_arg_gap(cd z, double alpha, double beta);

// Which case range of refined_arg_gap contains arg z (1, 2, or 0 = neither).
int refined_arg_case(cd z, double alpha, double beta);

// ---------------------------------------------------------------------------
// Determinant symbol
// ---------------------------------------------------------------------------

struct SymbolParams {
  double ell;      // length of the left habitat (-ell, 0)
  double L;        // length of the right habitat (0, L)
  double d_minus;  // diffusion coefficients
  double d_plus;
  double r_minus;  // reaction rates
  double r_plus;
  double q;        // interface permeability
  cd lambda;       // spectral parameter, member of S_{pi-eps0} u {0}

  double rho_minus() const { return r_minus / d_minus; }
  double rho_plus() const { return r_plus / d_plus; }
  double q_minus() const { return q / d_minus; }
  double q_plus() const { return q / d_plus; }
  cd lambda_minus() const { return lambda / d_minus; }
  cd lambda_plus() const { return lambda / d_plus; }

  void validate() const;  // throws std::invalid_argument naming the field
};

// f(z) for z in S_{eps0}; the sector membership of z and lambda is the
// caller's contract (checked by certify_symbol_floor, not here, so that the
// decay diagnostics can also probe boundary rays).
cd determinant_symbol(cd z, const SymbolParams& p);

// One bracket term q (1-e^{-c sqrt(w)}) / (sqrt(w) (1+e^{-c sqrt(w)})),
// the building block of f; exposed for the empirical tail scan.
cd symbol_bracket_term(cd w, double c, double q);

struct SectorSpec {
  double epsilon0;    // sector half-angle, in (0, pi/2)
  double radius_min;  // z-sampling radii
  double radius_max;
  int n_radial;       // z samples: n_radial log radii x n_angular angles
  int n_angular;
  double big_R;       // empirical tail radius for the admissibility bound

  void validate() const;
};

struct FloorCertificate {
  double min_abs_f;
  double floor;  // sin(eps0/2)
  bool pass;     // min_abs_f > floor, strict
  cd argmin_z;
  cd argmin_lambda;
  long samples;
};

// Scan |f| over the z-grid of `spec` crossed with the given lambda samples;
// pass iff the minimum exceeds sin(eps0/2) strictly.  Empty grids are a
// domain error.
FloorCertificate certify_symbol_floor(const SectorSpec& spec,
                                      const std::vector<SymbolParams>& p_grid);

// Log-spaced z-grid over S_{eps0} (boundary rays included) per `spec`.
std::vector<cd> sector_z_grid(const SectorSpec& spec);

// Default lambda sample set over S_{pi-eps0} u {0}: n_rays angles crossed
// with n_radii log radii, plus 0.
std::vector<cd> sector_lambda_grid(double epsilon0, int n_rays, int n_radii,
                                   double r_min, double r_max);

// Smallest radius R such that on the sampled lambda set both bracket terms
// of f stay below (1 - sin(eps0/2))/2 for every |z| >= R on the boundary
// rays of S_{eps0}.  Scans log-spaced radii; returns the last violating
// radius times a safety factor of 2.
double empirical_big_R(double epsilon0, const SymbolParams& base,
                       const std::vector<cd>& lambdas);

// Admissible sector half-angle bound atan(pi^2/(2R) min(1/L^2, 1/ell^2)).
double admissible_epsilon0(double big_R, double ell, double L);

}  // namespace semiperm::sector
