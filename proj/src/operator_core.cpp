#include "semiperm/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace semiperm::opcore {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kUnderflowExponent = 700.0;
}  // namespace

double TransversalOperator::closed_form_eigenvalue(int k) const {
  return -(4.0 / (h * h)) * std::pow(std::sin(k * kPi * h / 2.0), 2);
}

TransversalOperator build_dirichlet_laplacian(int n) {
  if (n < 1)
    throw std::domain_error("build_dirichlet_laplacian: n must be >= 1");
  TransversalOperator op;
  op.n = n;
  op.h = 1.0 / (n + 1);
  const double ih2 = 1.0 / (op.h * op.h);
  op.matrix = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    op.matrix(i, i) = -2.0 * ih2;
    if (i > 0) op.matrix(i, i - 1) = ih2;
    if (i + 1 < n) op.matrix(i, i + 1) = ih2;
  }
  // Eager eigendecomposition: immutable afterwards, so concurrent use needs
  // no synchronization.
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(op.matrix);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("build_dirichlet_laplacian: eigensolver failed");
  op.eigenvalues = es.eigenvalues();
  op.eigenvectors = es.eigenvectors();
  return op;
}

namespace {

SectorialityReport finalize_report(double m, const std::string& label,
                                   std::vector<cd> rejected) {
  SectorialityReport rep;
  rep.m_constant = m;
  rep.angle_bound = kPi - std::asin(1.0 / std::max(m, 1.0));
  rep.scanned_set = label;
  rep.rejected = std::move(rejected);
  return rep;
}

}  // namespace

SectorialityReport measure_sectoriality(const VectorXd& eigenvalues,
                                        const std::vector<cd>& samples,
                                        const std::string& label) {
  double m = 0.0;
  std::vector<cd> rejected;
  for (const cd lam : samples) {
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k)
      dist = std::min(dist, std::abs(lam - cd(eigenvalues[k], 0.0)));
    if (dist < 1e-10) {
      rejected.push_back(lam);
      continue;
    }
    m = std::max(m, std::abs(lam) / dist);
  }
  return finalize_report(m, label, std::move(rejected));
}

SectorialityReport measure_sectoriality(const MatrixXcd& op,
                                        const std::vector<cd>& samples,
                                        const std::string& label) {
  const Eigen::Index n = op.rows();
  Eigen::ComplexEigenSolver<MatrixXcd> es(op, false);
  double m = 0.0;
  std::vector<cd> rejected;
  for (const cd lam : samples) {
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k)
      dist = std::min(dist, std::abs(lam - es.eigenvalues()[k]));
    if (dist < 1e-10) {
      rejected.push_back(lam);
      continue;
    }
    const MatrixXcd res =
        (op - lam * MatrixXcd::Identity(n, n)).partialPivLu().solve(
            MatrixXcd::Identity(n, n));
    m = std::max(m, std::abs(lam) * res.jacobiSvd().singularValues()(0));
  }
  return finalize_report(m, label, std::move(rejected));
}

cd generator_eigenvalue(double mu, double d, double r, cd lambda) {
  return -std::sqrt(cd(-mu + r / d, 0.0) + lambda / d);
}

cd scalar_propagator(cd b, double x) {
  if (x * b.real() < -kUnderflowExponent) return cd(0.0, 0.0);
  return std::exp(x * b);
}

GeneratorMatrix build_generator(const MatrixXcd& a, double d, double r,
                                cd lambda, GeneratorKind kind) {
  if (!(d > 0.0)) throw std::domain_error("build_generator: d must be > 0");
  const Eigen::Index n = a.rows();
  const MatrixXcd shifted =
      -a + ((r + lambda) / d) * MatrixXcd::Identity(n, n);
  GeneratorMatrix g;
  g.matrix = -matfun::principal_sqrt(shifted);
  g.kind = kind;
  g.d = d;
  g.r = r;
  g.lambda = lambda;
  Eigen::ComplexEigenSolver<MatrixXcd> es(g.matrix, false);
  g.spectral_abscissa = es.eigenvalues().real().maxCoeff();
  return g;
}

GeneratorMatrix build_generator(const TransversalOperator& op, double d,
                                double r, cd lambda, GeneratorKind kind) {
  return build_generator(op.matrix.cast<cd>(), d, r, lambda, kind);
}

MatrixXcd propagator(const GeneratorMatrix& b, double x) {
  if (x < 0.0) throw std::domain_error("propagator: x must be >= 0");
  const Eigen::Index n = b.matrix.rows();
  if (x == 0.0) return MatrixXcd::Identity(n, n);
  if (x * std::abs(b.spectral_abscissa) > kUnderflowExponent)
    return MatrixXcd::Zero(n, n);
  return matfun::matrix_exp(x * b.matrix);
}

}  // namespace semiperm::opcore
