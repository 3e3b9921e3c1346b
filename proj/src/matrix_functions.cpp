#include "semiperm/matrix_functions.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace semiperm::matfun {

MatrixXcd principal_sqrt(const MatrixXcd& m, double branch_tol) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("principal_sqrt: matrix must be square");
  const Eigen::Index n = m.rows();

  Eigen::ComplexSchur<MatrixXcd> schur(m);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("principal_sqrt: Schur factorization failed");
  const MatrixXcd& t = schur.matrixT();
  const MatrixXcd& u = schur.matrixU();

  for (Eigen::Index i = 0; i < n; ++i) {
    const cd ev = t(i, i);
    if (ev.real() <= 0.0 && std::abs(ev.imag()) <= branch_tol &&
        std::abs(ev) >= 0.0) {
      if (std::abs(ev) <= branch_tol || ev.real() < 0.0)
        throw std::domain_error(
            "principal_sqrt: eigenvalue on or near the closed negative real "
            "axis");
    }
  }

  // Upper-triangular square root, column by column.
  MatrixXcd s = MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) s(i, i) = std::sqrt(t(i, i));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      cd acc = t(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) acc -= s(i, k) * s(k, j);
      s(i, j) = acc / (s(i, i) + s(j, j));
    }
  }
  return u * s * u.adjoint();
}

namespace {

// Pade(13) coefficients for expm.
constexpr double kPade13[] = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0,  129060195264000.0,   10559470521600.0,
    670442572800.0,      33522128640.0,       1323241920.0,
    40840800.0,          960960.0,            16380.0,
    182.0,               1.0};

}  // namespace

MatrixXcd matrix_exp(const MatrixXcd& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("matrix_exp: matrix must be square");
  const Eigen::Index n = m.rows();
  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();

  int squarings = 0;
  const double theta13 = 5.371920351148152;
  if (norm1 > theta13) {
    squarings = std::max(0, int(std::ceil(std::log2(norm1 / theta13))));
  }
  const MatrixXcd a = m / std::pow(2.0, squarings);

  const MatrixXcd a2 = a * a;
  const MatrixXcd a4 = a2 * a2;
  const MatrixXcd a6 = a2 * a4;
  const MatrixXcd ident = MatrixXcd::Identity(n, n);

  const MatrixXcd u =
      a * (a6 * (kPade13[13] * a6 + kPade13[11] * a4 + kPade13[9] * a2) +
           kPade13[7] * a6 + kPade13[5] * a4 + kPade13[3] * a2 +
           kPade13[1] * ident);
  const MatrixXcd v =
      a6 * (kPade13[12] * a6 + kPade13[10] * a4 + kPade13[8] * a2) +
      kPade13[6] * a6 + kPade13[4] * a4 + kPade13[2] * a2 + kPade13[0] * ident;

  MatrixXcd r = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

cd phi1(cd z) {
  if (std::abs(z) < 0.5) {
    cd term = 1.0, sum = 1.0;
    for (int j = 1; j <= 20; ++j) {
      term *= z / double(j + 1);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0) / z;
}

cd phi2(cd z) {
  if (std::abs(z) < 0.5) {
    cd term = cd(0.5, 0.0), sum = cd(0.5, 0.0);
    for (int j = 1; j <= 20; ++j) {
      term *= z / double(j + 2);
      sum += term;
    }
    return sum;
  }
  return (std::exp(z) - 1.0 - z) / (z * z);
}

cd phi2r(cd z) {
  if (std::abs(z) < 0.5) {
    // e^z phi2(-z): series of (e^z(z-1)+1)/z^2 = sum_{j>=0} (j+1) z^j/(j+2)!
    cd term = cd(0.5, 0.0), sum = cd(0.5, 0.0);
    cd zp = 1.0;
    double fact = 2.0;
    for (int j = 1; j <= 20; ++j) {
      zp *= z;
      fact *= double(j + 2);
      term = double(j + 1) / fact * zp;
      sum += term;
    }
    return sum;
  }
  return std::exp(z) * phi2(-z);
}

PhiSet phi_matrices(const MatrixXcd& z) {
  // exp of the augmented block matrix [[Z I 0],[0 0 I],[0 0 0]] carries
  // phi1(Z) and phi2(Z) in its first block row.
  const Eigen::Index n = z.rows();
  MatrixXcd aug = MatrixXcd::Zero(3 * n, 3 * n);
  aug.topLeftCorner(n, n) = z;
  aug.block(0, n, n, n) = MatrixXcd::Identity(n, n);
  aug.block(n, 2 * n, n, n) = MatrixXcd::Identity(n, n);
  const MatrixXcd e = matrix_exp(aug);
  PhiSet out;
  out.phi1 = e.block(0, n, n, n);
  out.phi2 = e.block(0, 2 * n, n, n);
  // phi2r(Z) = e^Z phi2(-Z)
  MatrixXcd augm = MatrixXcd::Zero(3 * n, 3 * n);
  augm.topLeftCorner(n, n) = -z;
  augm.block(0, n, n, n) = MatrixXcd::Identity(n, n);
  augm.block(n, 2 * n, n, n) = MatrixXcd::Identity(n, n);
  const MatrixXcd em = matrix_exp(augm);
  out.phi2r = e.topLeftCorner(n, n) * em.block(0, 2 * n, n, n);
  return out;
}

}  // namespace semiperm::matfun
