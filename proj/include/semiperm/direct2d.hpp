/*
 * direct2d.hpp — independent ground truth: a sparse 2D finite-difference
 * discretization of the transmission problem on both habitats.
 *
 * Interior rows implement d (u_xx + u_yy) - r u with second-order stencils;
 * outer Dirichlet rows are eliminated.  The two interface traces w-(0),
 * w+(0) are eliminated through the transmission conditions
 *
 *   d- w-'(0) = q (w+(0) - w-(0)),   d+ w+'(0) = q (w+(0) - w-(0)),
 *
 * discretized with 3-point one-sided derivatives, which keeps the matrix
 * banded and the interface second order.  Unknowns are the interior nodes of
 * both habitats; traces are recovered after the solve.
 *
 * The module provides resolvent solves (sparse LU), Crank-Nicolson time
 * stepping, a discrete weak-form residual against the variational identity
 * a(u,w) + b(u,w) = l(w) with bilinear tensor hats, and a semi-analytic
 * eigenpair oracle for a single cross-section mode.
 */

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <memory>
#include <vector>

#include "semiperm/grid.hpp"

namespace semiperm::direct2d {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using grid::GridFunction;
using grid::HabitatConfig;

struct Direct2DOperator {
  HabitatConfig cfg;
  Eigen::SparseMatrix<double> matrix;  // interior unknowns only
  int n_minus_interior = 0;            // longitudinal interior nodes, minus
  int n_plus_interior = 0;
  // interface elimination: trace = sum of coefficients times the four
  // neighbouring interior values [u-(M-1), u-(M-2), u+(1), u+(2)]
  double a_coef[4];  // w-(0)
  double b_coef[4];  // w+(0)

  int size() const {
    return (n_minus_interior + n_plus_interior) * cfg.n_transversal;
  }
  int index_minus(int j, int i) const {  // j = 1..n_minus_interior
    return (j - 1) * cfg.n_transversal + i;
  }
  int index_plus(int j, int i) const {  // j = 1..n_plus_interior
    return (n_minus_interior + j - 1) * cfg.n_transversal + i;
  }

  // interior part of a grid function as a stacked vector, and back
  VectorXcd restrict_interior(const GridFunction& f) const;
  GridFunction extend_with_traces(const VectorXcd& u) const;

  MatrixXd dense() const { return MatrixXd(matrix); }
};

Direct2DOperator build_2d_operator(const HabitatConfig& cfg);

// Cached factorization of (op - lambda I); solves are read-only afterwards.
class DirectResolventSolver {
 public:
  DirectResolventSolver(const Direct2DOperator& op, cd lambda);
  GridFunction solve(const GridFunction& f) const;
  double last_residual() const { return last_residual_; }

 private:
  const Direct2DOperator& op_;
  cd lambda_;
  Eigen::SparseLU<Eigen::SparseMatrix<cd>> lu_;
  Eigen::SparseMatrix<cd> shifted_;
  mutable double last_residual_ = 0.0;
};

// One-shot resolvent solve; residual exceeding 1e-10 ||f|| is an error.
GridFunction direct_resolvent_solve(const Direct2DOperator& op, cd lambda,
                                    const GridFunction& f);

// Crank-Nicolson trajectory u' = op u over n_steps of size dt.
GridFunction time_step_cn(const Direct2DOperator& op, const GridFunction& u0,
                          double dt, int n_steps);

// Stepper with cached factorizations for repeated use.
class CrankNicolson {
 public:
  CrankNicolson(const Direct2DOperator& op, double dt);
  GridFunction advance(const GridFunction& u, int n_steps) const;

 private:
  const Direct2DOperator& op_;
  double dt_;
  Eigen::SparseMatrix<double> forward_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
};

// max over the tensor-hat test basis of |a(u,w) + b(u,w) - l(w)| / mass(w),
// forms evaluated with bilinear (Q1) elements on the grid; g is the
// right-hand side of -P u = g.
double weak_residual(const Direct2DOperator& op, const GridFunction& u,
                     const GridFunction& g);

// Interface flux-balance residuals d± dw/dx(0) - q (w+(0) - w-(0)), max over
// the cross-section, 3-point one-sided derivatives.
struct FluxBalance {
  double minus;
  double plus;
};
FluxBalance interface_flux_residual(const HabitatConfig& cfg,
                                    const GridFunction& w);

// Eigenvalues of the assembled operator (dense solve, desk scale only).
VectorXcd spectrum(const Direct2DOperator& op);

// Inverse iteration for the k eigenpairs of smallest magnitude.
struct EigenPairs {
  VectorXd values;
  std::vector<VectorXd> vectors;  // interior coordinates
};
EigenPairs smallest_eigenpairs(const Direct2DOperator& op, int k,
                               int max_iter = 200, double tol = 1e-12);

// Semi-analytic oracle for one cross-section mode mu: the largest (closest
// to zero) eigenvalue nu of the 1-D transmission operator
//   d w'' + (d mu - r) w  on (-ell,0) u (0,L)
// with outer Dirichlet and the interface conditions, found from the
// transcendental characteristic equation by bisection, plus the sampled
// eigenfunction.
struct ModeEigenpair {
  double nu;
  VectorXd minus;  // values at the minus-side nodes
  VectorXd plus;
};
ModeEigenpair lowest_mode_eigenpair(const HabitatConfig& cfg, double mu);

}  // namespace semiperm::direct2d
