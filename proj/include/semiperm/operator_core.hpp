/*
 * operator_core.hpp — discretized cross-section operator and the matrix
 * functions built on it.
 *
 * The cross-section operator is the Dirichlet Laplacian on (0,1), second
 * differences on n interior nodes with spacing h = 1/(n+1).  Its eigenpairs
 * are known in closed form:
 *
 *   mu_k = -(4/h^2) sin^2(k pi h / 2),   v_k(i) = sqrt(2h) sin(k pi i h),
 *
 * which gives every derived operator a spectral fast path: any function of
 * the matrix is the scalar function applied to the eigenvalues.  The generic
 * dense path (Schur square root, scaling-and-squaring exponential) serves as
 * the correctness reference for nonsymmetric inputs.
 *
 * Generators are B = -sqrt(-A + ((r + lambda)/d) I); their semigroups decay,
 * and propagators are evaluated with an underflow floor: once
 * x |spectral abscissa| > 700 the propagator is identically zero.
 */

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "semiperm/matrix_functions.hpp"

namespace semiperm::opcore {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct TransversalOperator {
  int n = 0;
  double h = 0.0;
  MatrixXd matrix;        // (1,-2,1)/h^2, n x n
  VectorXd eigenvalues;   // mu_k, ascending (all negative)
  MatrixXd eigenvectors;  // orthonormal columns

  // closed-form eigenvalue -(4/h^2) sin^2(k pi h/2), k = 1..n
  double closed_form_eigenvalue(int k) const;
};

TransversalOperator build_dirichlet_laplacian(int n);

struct SectorialityReport {
  double m_constant;   // sup over samples of |lambda| ||(op - lambda)^{-1}||
  double angle_bound;  // pi - asin(1/m_constant)
  std::string scanned_set;
  std::vector<cd> rejected;  // samples within 1e-10 of the spectrum
};

// m_constant over the sample set for a real symmetric operator given by its
// eigenvalues (normal case: the resolvent norm is 1/dist to the spectrum).
SectorialityReport measure_sectoriality(const VectorXd& eigenvalues,
                                        const std::vector<cd>& samples,
                                        const std::string& label = {});

// Dense variant for a general complex matrix (spectral norm per sample).
SectorialityReport measure_sectoriality(const MatrixXcd& op,
                                        const std::vector<cd>& samples,
                                        const std::string& label = {});

enum class GeneratorKind { b_minus, b_plus, generic };

struct GeneratorMatrix {
  MatrixXcd matrix;  // B, spectrum in the open left half-plane
  GeneratorKind kind = GeneratorKind::generic;
  double d = 1.0;
  double r = 0.0;
  cd lambda{0.0, 0.0};
  double spectral_abscissa = 0.0;  // max Re of the spectrum (negative)
};

// B = -principal_sqrt(-A + ((r + lambda)/d) I) on the dense path.
GeneratorMatrix build_generator(const TransversalOperator& op, double d,
                                double r, cd lambda,
                                GeneratorKind kind = GeneratorKind::generic);

// Same, for an arbitrary square complex A.
GeneratorMatrix build_generator(const MatrixXcd& a, double d, double r,
                                cd lambda,
                                GeneratorKind kind = GeneratorKind::generic);

// e^{xB} for x >= 0 (dense path), with the underflow floor.
MatrixXcd propagator(const GeneratorMatrix& b, double x);

// Scalar counterparts of the generator map and propagator, used by the
// spectral path: b = -sqrt(z + (r + lambda)/d) for z = -mu.
cd generator_eigenvalue(double mu, double d, double r, cd lambda);
cd scalar_propagator(cd b, double x);  // e^{x b} with underflow floor

}  // namespace semiperm::opcore
