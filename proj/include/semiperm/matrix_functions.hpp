/*
 * matrix_functions.hpp — dense matrix functions for the generic (possibly
 * nonsymmetric) operator path.
 *
 *   principal_sqrt  : complex Schur factorization + triangular recurrence;
 *                     the principal branch (spectrum in Re > 0) requires the
 *                     input spectrum to avoid the closed negative real axis.
 *   matrix_exp      : Pade(13) scaling-and-squaring.
 *   phi1/phi2/phi2r : scalar kernels of the exponential trapezoid rule,
 *                       phi1(z)  = (e^z - 1)/z
 *                       phi2(z)  = (e^z - 1 - z)/z^2
 *                       phi2r(z) = (e^z (z-1) + 1)/z^2 = e^z phi2(-z),
 *                     evaluated by series near 0 to avoid cancellation.
 *   phi_matrices    : matrix phi1, phi2, phi2r of one argument, via an
 *                     augmented-block exponential (no inversion of Z).
 */

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace semiperm::matfun {

using cd = std::complex<double>;
using Eigen::MatrixXcd;

// Principal square root.  Throws std::domain_error when an eigenvalue lies
// within `branch_tol` of the closed negative real axis.
MatrixXcd principal_sqrt(const MatrixXcd& m, double branch_tol = 1e-8);

// e^m by scaling and squaring.
MatrixXcd matrix_exp(const MatrixXcd& m);

cd phi1(cd z);
cd phi2(cd z);
cd phi2r(cd z);

struct PhiSet {
  MatrixXcd phi1;
  MatrixXcd phi2;
  MatrixXcd phi2r;
};

PhiSet phi_matrices(const MatrixXcd& z);

}  // namespace semiperm::matfun
