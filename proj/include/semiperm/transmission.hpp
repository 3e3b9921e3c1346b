/*
 * transmission.hpp — the explicit resolvent of the two-habitat transmission
 * operator.
 *
 * For the spectral parameter lambda in S_{pi-eps0} u {0} the solution of
 * (S - lambda) w = f is assembled from
 *
 *   B± = -sqrt(-A + ((r± + lambda)/d±) I),
 *   w-(x) = e^{(x+ell)B-} j- + e^{-xB-} k- + v-(g-)(x),
 *   w+(x) = e^{xB+} j+ + e^{(L-x)B+} k+ + v+(g+)(x),      g± = f±/d±,
 *
 * with the boundary coefficients solved through the operator determinant
 *
 *   D = (I + e^{2 ell B-})(I + e^{2 L B+}) D*,
 *   D* = I - q+ B+^{-1}(I - e^{2LB+})(I + e^{2LB+})^{-1}
 *          - q- B-^{-1}(I - e^{2 ell B-})(I + e^{2 ell B-})^{-1},
 *
 * whose inverse on the spectral path is the scalar map 1/f(-mu_k) with f the
 * determinant symbol of complex_geometry.hpp.
 *
 * Two evaluation paths share one pipeline: the spectral path (symmetric
 * cross-section operator; every factor is a scalar map on the eigenvalues)
 * and a generic dense path (Schur square root, scaling-and-squaring
 * exponential).  Factors are functions of the one matrix A, so they commute;
 * products are evaluated left to right as displayed.
 *
 * Convolution terms v± use the interval recurrence
 *
 *   I_j = e^{dx B} I_{j-1} + dx [ (phi1 - phi2)(dx B) g_{j-1} + phi2(dx B) g_j ],
 *
 * which integrates the propagator against the piecewise-linear interpolant
 * of g exactly (order 2, and the correct boundary-layer limit when
 * |B| dx >> 1).  Interface derivative traces come from the exact formulas
 * v-'(0) = (1/2) int e^{-tB-} g-, v+'(0) = -(1/2) int e^{tB+} g+, never from
 * differencing.
 *
 * Workspaces are immutable after assembly; applications are read-only.  The
 * intended parallelism unit is one workspace per lambda.
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "semiperm/grid.hpp"
#include "semiperm/operator_core.hpp"

namespace semiperm::transmission {

using cd = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using grid::GridFunction;
using grid::HabitatConfig;

enum class Path { spectral, dense };
enum class Side { minus, plus };

// Per-lambda operator data for one evaluation path.  Coefficients are
// diagonal (ArrayXcd over modes) on the spectral path and full matrices on
// the dense path; PathData stores whichever applies.
template <class Coef>
struct PathData {
  Coef b_minus, b_plus;            // generator coefficients
  Coef inv_b_minus, inv_b_plus;    // B±^{-1}
  Coef prop_ell, prop_L;           // e^{ell B-}, e^{L B+}
  Coef prop_2ell, prop_2L;         // e^{2 ell B-}, e^{2 L B+}
  Coef inv_plus_2ell, inv_plus_2L;    // (I + e^{2.B})^{-1}
  Coef inv_minus_2ell, inv_minus_2L;  // (I - e^{2.B})^{-1}
  Coef dstar_inv;                  // D*^{-1}
  // longitudinal node propagators
  std::vector<Coef> pm_left;   // e^{(x_j+ell) B-}
  std::vector<Coef> pm_right;  // e^{-x_j B-}
  std::vector<Coef> pp_left;   // e^{x_j B+}
  std::vector<Coef> pp_right;  // e^{(L-x_j) B+}
  // slice quadrature weights per side
  Coef m_P, m_wl0, m_wl1, m_wr0, m_wr1;
  Coef p_P, p_wl0, p_wl1, p_wr0, p_wr1;
};

struct ResolventWorkspace {
  HabitatConfig cfg;
  cd lambda;
  double epsilon0;
  Path path;

  double rho_minus, rho_plus, q_minus, q_plus;
  cd lambda_minus, lambda_plus;

  VectorXd mu;     // cross-section eigenvalues (spectral path)
  MatrixXd basis;  // orthonormal eigenvectors

  std::optional<PathData<ArrayXcd>> spec;
  std::optional<PathData<MatrixXcd>> dense;
};

// Assemble all lambda-dependent operator data.  lambda outside
// S_{pi-eps0} u {0} is a domain error; a numerically singular determinant
// factor (condition > 1e12) is an internal error.
ResolventWorkspace assemble_workspace(const HabitatConfig& cfg, cd lambda,
                                      double epsilon0,
                                      Path path = Path::spectral);

// One-sided convolution v_side(g) and its exact traces, physical
// coordinates.  g has n_long_side rows and n_transversal columns.
struct SideConvolution {
  MatrixXcd v;          // v(x_j), nodes x n
  VectorXcd v_outer;    // v(-ell) resp. v(L)
  VectorXcd v_inner;    // v(0)
  VectorXcd vprime0;    // v'(0)
  VectorXcd j_left;     // int e^{(outer-distance kernel)} g: minus int e^{-tB-}g,
                        // plus int e^{(L-t)B+}g
  VectorXcd j_right;    // minus int e^{(t+ell)B-}g, plus int e^{tB+}g
};

SideConvolution convolve_v(const ResolventWorkspace& ws, Side side,
                           const MatrixXcd& g);

// U(g)(x_j) = int e^{|x_j - t| B_side} g(t) dt (= 2 B v).
MatrixXcd apply_abs_kernel(const ResolventWorkspace& ws, Side side,
                           const MatrixXcd& g);

// Rows e^{phi(x_j) B} v over the longitudinal nodes, for the four node
// propagator families phi(x) = x+ell, -x (minus side), x, L-x (plus side).
enum class PropagatorFamily {
  minus_from_left,   // e^{(x+ell) B-}
  minus_from_right,  // e^{-x B-}
  plus_from_left,    // e^{x B+}
  plus_from_right    // e^{(L-x) B+}
};
MatrixXcd propagate_nodes(const ResolventWorkspace& ws, PropagatorFamily fam,
                          const VectorXcd& v);

// The interface data feeding the boundary-coefficient system.
struct InterfaceData {
  VectorXcd pi_prime;
  VectorXcd pi_double_prime;
};

InterfaceData boundary_data(const ResolventWorkspace& ws,
                            const SideConvolution& conv_minus,
                            const SideConvolution& conv_plus);

struct BoundaryCoefficients {
  VectorXcd j_minus, k_minus, j_plus, k_plus;
};

BoundaryCoefficients solve_boundary_coefficients(const ResolventWorkspace& ws,
                                                 const InterfaceData& data,
                                                 const SideConvolution& conv_minus,
                                                 const SideConvolution& conv_plus);

// (S - lambda)^{-1} f through the explicit formulas.
GridFunction apply_resolvent(const ResolventWorkspace& ws,
                             const GridFunction& f);

GridFunction apply_resolvent(const HabitatConfig& cfg, cd lambda,
                             double epsilon0, const GridFunction& f,
                             Path path = Path::spectral);

// Residuals of a candidate solution w of (S - lambda) w = f: interior second
// differences against the mode equation, outer Dirichlet values, and the two
// interface conditions with 3-point one-sided derivatives.
struct ResolventResiduals {
  double ode_minus, ode_plus;      // max interior residual, scaled by 1+|g|
  double dirichlet_minus, dirichlet_plus;
  double interface_minus, interface_plus;
};

ResolventResiduals resolvent_residuals(const ResolventWorkspace& ws,
                                       const GridFunction& f,
                                       const GridFunction& w);

// Residual of the four-condition boundary system for given coefficients,
// scaled by 1 + |pi'| + |pi''|; the solve contract keeps it under 1e-8.
double boundary_system_residual(const ResolventWorkspace& ws,
                                const InterfaceData& data,
                                const SideConvolution& conv_minus,
                                const SideConvolution& conv_plus,
                                const BoundaryCoefficients& coef);

// || D*^{-1} ||_2 and the identity residual || D D^{-1} - I ||_2.
double dstar_inverse_norm(const ResolventWorkspace& ws);
double det_identity_residual(const ResolventWorkspace& ws);

}  // namespace semiperm::transmission
