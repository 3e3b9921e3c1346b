/*
 * grid.hpp — problem configuration and cross-section-valued grid functions.
 *
 * The geometry is two juxtaposed habitats (-ell, 0) x (0,1) and (0, L) x
 * (0,1) meeting at the interface x = 0.  Longitudinal grids are uniform and
 * include both endpoints; the solution may jump across the interface, so the
 * minus grid ends at x = 0^- and the plus grid starts at x = 0^+ as separate
 * nodes.  Cross-section sampling lives on the n interior Dirichlet nodes
 * y_i = i/(n+1).
 *
 * Norms are discrete L^p norms with trapezoid weights in x and uniform
 * weight h in y.
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace semiperm::grid {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct HabitatConfig {
  double ell = 1.0;  // left habitat length
  double L = 1.0;    // right habitat length
  double d_minus = 1.0;
  double d_plus = 1.0;
  double r_minus = 1.0;
  double r_plus = 1.0;
  double q = 1.0;
  int n_transversal = 8;   // interior cross-section nodes
  int n_long_minus = 33;   // longitudinal nodes on [-ell, 0], both ends
  int n_long_plus = 33;    // longitudinal nodes on [0, L], both ends

  void validate() const;  // throws std::invalid_argument naming the field

  double dx_minus() const { return ell / (n_long_minus - 1); }
  double dx_plus() const { return L / (n_long_plus - 1); }
  double h() const { return 1.0 / (n_transversal + 1); }
  // endpoints pinned exactly so boundary propagators cancel exactly
  double x_minus(int j) const {
    return j == n_long_minus - 1 ? 0.0 : -ell + j * dx_minus();
  }
  double x_plus(int j) const {
    return j == n_long_plus - 1 ? L : j * dx_plus();
  }
  double y(int i) const { return (i + 1) * h(); }
};

enum class NormKind { p1, p2, pinf };

NormKind norm_kind_from_string(const std::string& s);
std::string to_string(NormKind k);

struct GridFunction {
  MatrixXcd minus;  // n_long_minus x n_transversal
  MatrixXcd plus;   // n_long_plus  x n_transversal

  static GridFunction zero(const HabitatConfig& cfg);

  // Sample a closed-form field u(x, y) on both habitat grids.
  static GridFunction sample(const HabitatConfig& cfg,
                             const std::function<cd(double, double)>& u);

  // Seeded random smooth field: a low-order tensor-sine combination whose
  // coefficients come from the seed, so the field transfers across grid
  // resolutions.
  static GridFunction random_smooth(const HabitatConfig& cfg, uint64_t seed,
                                    int n_modes = 4);

  void check_shape(const HabitatConfig& cfg) const;
};

double norm(const GridFunction& f, const HabitatConfig& cfg, NormKind kind);

// Weighted l2 inner product matching norm(..., p2): trapezoid in x, h in y.
cd inner_product(const GridFunction& f, const GridFunction& g,
                 const HabitatConfig& cfg);

GridFunction conj(const GridFunction& f);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(cd s, const GridFunction& a);

}  // namespace semiperm::grid
