/*
 * Checks for the cross-section operator: closed-form eigenvalues, the
 * sectoriality constants, the matrix square root against an eigendecomposition
 * oracle, generators, propagators, and the resolvent-decay bounds for the
 * generators across a lambda sweep.
 */

#include "semiperm/operator_core.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "semiperm/matrix_functions.hpp"
#include "test_support.hpp"

using namespace semiperm;
using opcore::build_dirichlet_laplacian;
using opcore::build_generator;
using opcore::generator_eigenvalue;
using opcore::GeneratorMatrix;
using opcore::measure_sectoriality;
using opcore::propagator;
using testsup::check;
using testsup::check_near;
using testsup::check_throws;
using testsup::section;

namespace {

using cd = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;

void test_laplacian() {
  section("Dirichlet Laplacian");
  const auto op1 = build_dirichlet_laplacian(1);
  check_near(op1.matrix(0, 0), -8.0, 1e-14, "n=1: matrix is [-8]");
  const auto op3 = build_dirichlet_laplacian(3);
  // closed-form eigenvalues -64 sin^2(k pi/8)
  check_near(op3.eigenvalues[0], -64.0 * std::pow(std::sin(3 * kPi / 8), 2),
             1e-10, "n=3: most negative eigenvalue");
  check_near(op3.eigenvalues[1], -32.0, 1e-10, "n=3: middle eigenvalue");
  check_near(op3.eigenvalues[2], -64.0 * std::pow(std::sin(kPi / 8), 2), 1e-10,
             "n=3: eigenvalue closest to zero");
  for (const int n : {16, 32, 64}) {
    const auto op = build_dirichlet_laplacian(n);
    double worst = 0.0;
    for (int k = 1; k <= n; ++k)
      worst = std::max(worst,
                       std::abs(op.eigenvalues[n - k] -
                                op.closed_form_eigenvalue(k)) /
                           std::abs(op.closed_form_eigenvalue(k)));
    check(worst < 1e-10, "n=" + std::to_string(n) +
                             ": eigenvalues match the closed form to 1e-10");
  }
  // Richardson extrapolation of the smallest-magnitude eigenvalue to -pi^2
  const double e32 = build_dirichlet_laplacian(32).eigenvalues[31];
  const double e64 = build_dirichlet_laplacian(64).eigenvalues[63];
  // spacings h = 1/33 and 1/65 are not a clean factor two, so extrapolate in
  // h^2 explicitly
  const double h1 = 1.0 / 33, h2 = 1.0 / 65;
  const double extrap = e64 + (e64 - e32) * h2 * h2 / (h1 * h1 - h2 * h2);
  check_near(extrap, -kPi * kPi, 1e-4, "Richardson limit -pi^2");
  check_throws([] { build_dirichlet_laplacian(0); }, "n=0 is a domain error");
}

void test_sectoriality() {
  section("sectoriality measurements");
  {
    // 1x1 operator [1]: sup_t t/(t+1) below 1
    VectorXd ev(1);
    ev << 1.0;
    std::vector<cd> samples;
    for (double t = 1e-3; t < 1e8; t *= 3.0) samples.push_back(cd(-t, 0.0));
    const auto rep = measure_sectoriality(ev, samples, "negative real axis");
    check(rep.m_constant <= 1.0 + 1e-12, "1x1: m <= 1");
    check(rep.m_constant > 0.999, "1x1: m approaches 1");
  }
  {
    // -A0 positive definite: normal-matrix bound gives m = 1 on the axis
    const auto op = build_dirichlet_laplacian(12);
    const VectorXd pos = -op.eigenvalues;
    std::vector<cd> samples;
    for (double t = 1e-2; t < 1e9; t *= 2.5) samples.push_back(cd(-t, 0.0));
    const auto rep = measure_sectoriality(pos, samples, "negative real axis");
    check(rep.m_constant <= 1.0 + 1e-12, "-A0: m_constant <= 1");
    check(rep.angle_bound >= kPi / 2, "angle bound beyond the half-plane");
  }
  {
    // samples on the ray arg = pi - eps against an SPD operator: m <= 1/sin(eps)
    const auto op = build_dirichlet_laplacian(12);
    const VectorXd pos = -op.eigenvalues;
    const double eps = 0.3;
    std::vector<cd> samples;
    for (double r = 1e-2; r < 1e8; r *= 3.0)
      samples.push_back(std::polar(r, kPi - eps));
    const auto rep = measure_sectoriality(pos, samples, "boundary ray");
    check(rep.m_constant <= 1.0 / std::sin(eps) + 1e-6,
          "ray samples: m <= 1/sin(eps)");
  }
  {
    // dense variant agrees with the eigenvalue formula on a symmetric input
    const auto op = build_dirichlet_laplacian(6);
    std::vector<cd> samples = {cd(-1.0, 0.0), cd(-10.0, 0.0), cd(2.0, 3.0)};
    const auto normal = measure_sectoriality((-op.eigenvalues).eval(), samples);
    const auto dense =
        measure_sectoriality((-op.matrix).cast<cd>().eval(), samples);
    check_near(dense.m_constant, normal.m_constant,
               1e-9 * normal.m_constant, "dense path matches the normal formula");
  }
}

void test_principal_sqrt() {
  section("principal square root");
  using matfun::principal_sqrt;
  const MatrixXcd ident = MatrixXcd::Identity(5, 5);
  check((principal_sqrt(ident) - ident).norm() < 1e-13, "sqrt(I) = I");
  {
    MatrixXcd d = MatrixXcd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 9.0;
    const MatrixXcd s = principal_sqrt(d);
    check_near(s(0, 0).real(), 2.0, 1e-13, "sqrt(diag(4,9)) = diag(2,3) [0]");
    check_near(s(1, 1).real(), 3.0, 1e-13, "sqrt(diag(4,9)) = diag(2,3) [1]");
  }
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  {
    // random SPD 8x8 against the eigendecomposition square root
    MatrixXd g(8, 8);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) g(i, j) = u(rng);
    const MatrixXd spd = g * g.transpose() + 8.0 * MatrixXd::Identity(8, 8);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(spd);
    const MatrixXd oracle = es.eigenvectors() *
                            es.eigenvalues().cwiseSqrt().asDiagonal() *
                            es.eigenvectors().transpose();
    const MatrixXcd s = principal_sqrt(spd.cast<cd>());
    check((s - oracle.cast<cd>()).norm() / oracle.norm() < 1e-10,
          "SPD 8x8 matches the eigendecomposition oracle to 1e-10");
  }
  {
    // (sqrt m)^2 = m over 100 random matrices with sectorial spectrum
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 3 + int(std::floor(6.0 * std::abs(u(rng))));
      MatrixXcd m(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = cd(u(rng), u(rng));
      // shift the spectrum right of the branch cut
      const Eigen::ComplexEigenSolver<MatrixXcd> es(m, false);
      const double min_re = es.eigenvalues().real().minCoeff();
      m += (1.0 + std::abs(min_re)) * MatrixXcd::Identity(n, n);
      const MatrixXcd s = principal_sqrt(m);
      worst = std::max(worst, ((s * s - m).norm() / m.norm()));
      const Eigen::ComplexEigenSolver<MatrixXcd> es2(s, false);
      if (es2.eigenvalues().real().minCoeff() <= 0.0) worst = 1.0;
    }
    check(worst < 1e-10,
          "(sqrt m)^2 = m to 1e-10 and spectrum in Re > 0, 100 matrices");
  }
  check_throws(
      [] {
        MatrixXcd bad = MatrixXcd::Identity(2, 2);
        bad(0, 0) = -1.0;
        matfun::principal_sqrt(bad);
      },
      "eigenvalue on the negative axis is a branch error");
}

void test_generators() {
  section("generators");
  const auto op1 = build_dirichlet_laplacian(1);  // A = [-8]
  {
    const auto b = build_generator(op1, 1.0, 0.0, cd(0.0, 0.0));
    check_near(b.matrix(0, 0).real(), -std::sqrt(8.0), 1e-12,
               "scalar: B = -sqrt(8)");
  }
  {
    const auto b = build_generator(op1, 1.0, 1.0, cd(3.0, 0.0));
    check_near(b.matrix(0, 0).real(), -std::sqrt(12.0), 1e-12,
               "scalar: B = -sqrt(12)");
  }
  {
    const auto b = build_generator(op1, 2.0, 1.0, cd(0.0, 2.0));
    const cd expected = -std::sqrt(cd(8.0, 0.0) + cd(1.0, 2.0) / 2.0);
    check(std::abs(b.matrix(0, 0) - expected) < 1e-12,
          "scalar complex: principal branch");
    check(std::abs(b.matrix(0, 0) -
                   generator_eigenvalue(-8.0, 2.0, 1.0, cd(0.0, 2.0))) < 1e-14,
          "dense and scalar generator maps agree");
  }
  {
    // B^2 = A - ((r + lambda)/d) I to 1e-10 relative
    const auto op = build_dirichlet_laplacian(8);
    double worst = 0.0;
    for (const cd lam : {cd(0.0, 0.0), cd(5.0, 2.0), cd(-3.0, 4.0)}) {
      const auto b = build_generator(op, 0.7, 0.3, lam);
      const MatrixXcd lhs = b.matrix * b.matrix;
      const MatrixXcd rhs = -op.matrix.cast<cd>() +
                            ((0.3 + lam) / 0.7) * MatrixXcd::Identity(8, 8);
      worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
    }
    check(worst < 1e-10, "B^2 = -A + ((r+lambda)/d) I to 1e-10");
  }
}

void test_propagator() {
  section("propagators");
  const auto op = build_dirichlet_laplacian(6);
  const auto b = build_generator(op, 1.0, 0.5, cd(2.0, 1.0));
  check((propagator(b, 0.0) - MatrixXcd::Identity(6, 6)).norm() < 1e-14,
        "x=0 gives the identity");
  {
    MatrixXcd scal(1, 1);
    scal(0, 0) = cd(-2.0, 0.0);
    GeneratorMatrix g;
    g.matrix = scal;
    g.spectral_abscissa = -2.0;
    check_near(propagator(g, 1.0)(0, 0).real(), std::exp(-2.0), 1e-14,
               "scalar propagator e^{-2}");
  }
  {
    const MatrixXcd p1 = propagator(b, 0.3);
    const MatrixXcd p2 = propagator(b, 0.45);
    const MatrixXcd p3 = propagator(b, 0.75);
    check((p1 * p2 - p3).norm() / p3.norm() < 1e-9,
          "semigroup law e^{(x+y)B} = e^{xB} e^{yB} to 1e-9");
  }
  {
    // long-range cutoff: underflow floor returns exactly zero
    const MatrixXcd z = propagator(b, 1e4);
    check(z.norm() == 0.0, "propagator underflow floor");
  }
  check_throws([&] { propagator(b, -1.0); }, "x < 0 is a domain error");
  {
    // decay fit: log ||e^{tB}|| ~ log C - c t |lambda/d + r/d|^{1/2} with
    // positive c, C stable across three decades of |lambda|
    double prev_c = 0.0;
    bool cs_positive = true, bounded = true;
    for (const double lr : {1.0, 10.0, 100.0, 1000.0}) {
      const cd lam = std::polar(lr, 2.0);
      const auto bb = build_generator(op, 1.0, 0.5, lam);
      const double rate = std::sqrt(std::abs(lam + 0.5));
      std::vector<double> ts = {0.5, 1.0, 2.0, 4.0};
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const double t : ts) {
        const double nrm = propagator(bb, t).jacobiSvd().singularValues()(0);
        const double x = t * rate, y = std::log(std::max(nrm, 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double n = double(ts.size());
      const double c_hat = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
      if (c_hat <= 0.0) cs_positive = false;
      if (prev_c > 0.0 && (c_hat > 20.0 * prev_c || c_hat < prev_c / 20.0))
        bounded = false;
      prev_c = c_hat;
    }
    check(cs_positive, "fitted decay rate c positive across the sweep");
    check(bounded, "fitted decay rates stable across |lambda| decades");
  }
}

void test_generator_resolvent_decay() {
  section("generator resolvent decay");
  // ||(B - z)^{-1}|| <= C/(1+|z|) with one C across |lambda| decades; z
  // sampled on the closed right half-plane rays where the estimate is used
  const auto op = build_dirichlet_laplacian(12);
  double worst_over_lambda = 0.0, best_over_lambda = 1e300;
  for (const double lr : {10.0, 1000.0, 100000.0}) {
    const cd lam = std::polar(lr, 2.2);
    Eigen::ArrayXcd bs(12);
    for (int k = 0; k < 12; ++k)
      bs[k] = generator_eigenvalue(op.eigenvalues[k], 1.0, 0.5, lam);
    double sup = 0.0;
    for (const double ang : {0.0, kPi / 4, -kPi / 4, kPi / 2 - 1e-9,
                             -kPi / 2 + 1e-9})
      for (double r = 1e-3; r < 1e7; r *= 2.2) {
        const cd z = std::polar(r, ang);
        double dist = 1e300;
        for (int k = 0; k < 12; ++k) dist = std::min(dist, std::abs(z - bs[k]));
        sup = std::max(sup, (1.0 + std::abs(z)) / dist);
      }
    // z = 0 (the inverse itself)
    double dist0 = 1e300;
    for (int k = 0; k < 12; ++k) dist0 = std::min(dist0, std::abs(bs[k]));
    sup = std::max(sup, 1.0 / dist0);
    worst_over_lambda = std::max(worst_over_lambda, sup);
    best_over_lambda = std::min(best_over_lambda, sup);
  }
  check(worst_over_lambda < 1e3, "sup (1+|z|) ||(B-z)^{-1}|| finite");
  check(worst_over_lambda <= 10.0 * best_over_lambda,
        "decade-stable across the lambda sweep");
}

}  // namespace

int main() {
  test_laplacian();
  test_sectoriality();
  test_principal_sqrt();
  test_generators();
  test_propagator();
  test_generator_resolvent_decay();
  return testsup::finish();
}
