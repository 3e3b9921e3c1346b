/*
 * Checks for the complex-plane geometry: branch conventions, the argument
 * inequalities with random sweeps, the determinant symbol and its sector
 * floor, tail decay, and the empirical admissibility scan.
 */

#include "semiperm/complex_geometry.hpp"

#include <cmath>
#include <random>

#include "test_support.hpp"

using namespace semiperm::sector;
using testsup::check;
using testsup::check_near;
using testsup::check_throws;
using testsup::section;

namespace {

constexpr double kTight = 1e-12;

SymbolParams unit_params(cd lambda) {
  SymbolParams p;
  p.ell = p.L = 1.0;
  p.d_minus = p.d_plus = 1.0;
  p.r_minus = p.r_plus = 1.0;
  p.q = 1.0;
  p.lambda = lambda;
  return p;
}

void test_principal_arg() {
  section("principal_arg");
  check_near(principal_arg(cd(1.0, 0.0)), 0.0, kTight, "arg(1) = 0");
  check_near(principal_arg(cd(-1.0, 0.0)), kPi, kTight,
             "arg(-1) = pi (branch convention)");
  check_near(principal_arg(cd(-1.0, -0.0)), kPi, kTight,
             "arg(-1 - 0i) stays on the (-pi, pi] branch");
  check_near(principal_arg(cd(1.0, 1.0)), kPi / 4, kTight, "arg(1+i) = pi/4");
  check_near(2.0 * std::atan(1.0 / (1.0 + std::sqrt(2.0))), kPi / 4, kTight,
             "half-angle identity at 1+i");
  // off the real axis the half-angle form agrees to machine precision, up to
  // its own conditioning: the denominator Re z + |z| cancels near the cut
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const cd z(u(rng), u(rng));
    if (z.imag() == 0.0) continue;
    const double direct = principal_arg(z);
    const double half = 2.0 * std::atan(z.imag() / (z.real() + std::abs(z)));
    const double conditioning = 1.0 + std::abs(z) / (z.real() + std::abs(z));
    worst = std::max(worst, std::abs(direct - half) / conditioning);
  }
  check(worst < 1e-13, "half-angle identity, 1e4 random samples");
  check_throws([] { principal_arg(cd(0.0, 0.0)); }, "arg(0) is a domain error");
}

void test_shift_monotonicity() {
  section("shift monotonicity under real translations");
  check(shift_monotonicity_holds(cd(0.0, 1.0), 1.0),
        "z=i, c=1: |arg(1+i)| < |arg(i)|");
  check(shift_monotonicity_holds(cd(-1.0, 1.0), 0.5), "z=-1+i, c=1/2");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uang(-kPi, kPi), umag(-3.0, 3.0),
      u01(0.0, 1.0);
  long violations = 0;
  for (long k = 0; k < 100000; ++k) {
    const cd z = std::polar(std::pow(10.0, umag(rng)), uang(rng));
    if (z.imag() == 0.0) continue;
    const double c = (u01(rng) < 0.5 ? 1.0 : -1.0) * std::pow(10.0, umag(rng));
    if (z + c == cd(0.0, 0.0)) continue;
    if (!shift_monotonicity_holds(z, c)) ++violations;
  }
  check(violations == 0, "1e5 random (z, c): zero violations");
  check_throws([] { shift_monotonicity_holds(cd(1.0, 0.0), 1.0); },
               "real z is a domain error");
}

void test_sum_sandwich() {
  section("argument sandwich for sums");
  check(sum_arg_sandwich(cd(1.0, 0.0), cd(0.0, 1.0)) == SandwichOutcome::holds,
        "z1=1, z2=i: arg(1+i) between 0 and pi/2");
  // negative real pair: the chain degenerates to equalities at pi
  check(sum_arg_sandwich(cd(-1.0, 0.0), cd(-1.0, 0.0)) ==
            SandwichOutcome::holds,
        "z1=z2=-1: equality chain at pi");
  check_near(principal_arg(cd(-2.0, 0.0)), kPi, kTight,
             "arg(z1+z2) = pi for z1=z2=-1");
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uang(-kPi, kPi), umag(-2.0, 2.0),
      u01(0.0, 1.0);
  long violations = 0, tested = 0;
  while (tested < 100000) {
    const double a2 = uang(rng);
    const double a1 = a2 >= 0.0 ? (a2 - kPi) + kPi * u01(rng)
                                : -kPi + (a2 + kPi) * u01(rng);
    const cd z1 = std::polar(std::pow(10.0, umag(rng)), a1);
    const cd z2 = std::polar(std::pow(10.0, umag(rng)), a2);
    if (z1 + z2 == cd(0.0, 0.0)) continue;
    const auto outcome = sum_arg_sandwich(z1, z2);
    if (outcome == SandwichOutcome::hypothesis_not_met) continue;
    ++tested;
    if (outcome != SandwichOutcome::holds) ++violations;
  }
  check(violations == 0, "1e5 hypothesis-satisfying pairs: zero violations");
  check(sum_arg_sandwich(cd(1.0, 0.0), cd(1.0, 1.0)) !=
            SandwichOutcome::violated,
        "hypothesis handling on the positive half-plane");
  check_throws([] { sum_arg_sandwich(cd(1.0, 0.0), cd(-1.0, 0.0)); },
               "z1+z2 = 0 is a domain error");
}

void test_modulus_bound() {
  section("half-angle modulus lower bound");
  auto b = sum_modulus_lower_bound(cd(1.0, 0.0), cd(1.0, 0.0));
  check_near(b.lhs, 2.0, kTight, "aligned vectors: lhs = 2");
  check_near(b.rhs, 2.0, kTight, "aligned vectors: rhs = 2");
  b = sum_modulus_lower_bound(cd(1.0, 0.0), cd(0.0, 1.0));
  check_near(b.lhs, std::sqrt(2.0), kTight, "orthogonal unit: lhs = sqrt2");
  check_near(b.rhs, std::sqrt(2.0), kTight, "orthogonal unit: rhs = sqrt2");
  b = sum_modulus_lower_bound(cd(2.0, 0.0), cd(0.0, 1.0));
  check_near(b.lhs, std::sqrt(5.0), kTight, "(2, i): lhs = sqrt5");
  check_near(b.rhs, 3.0 * std::cos(kPi / 4), kTight, "(2, i): rhs = 3 cos(pi/4)");
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uang(-kPi, kPi), umag(-3.0, 3.0);
  long violations = 0;
  for (long k = 0; k < 100000; ++k) {
    const cd z1 = std::polar(std::pow(10.0, umag(rng)), uang(rng));
    const cd z2 = std::polar(std::pow(10.0, umag(rng)), uang(rng));
    const auto bb = sum_modulus_lower_bound(z1, z2);
    if (bb.lhs < bb.rhs - kTight) ++violations;
  }
  check(violations == 0, "1e5 random pairs: zero violations");
}

void test_exp_bracket() {
  section("exponential bracket bounds on a sector");
  const auto b = exp_bracket_bounds(cd(1.0, 0.0), kPi / 4);
  check_near(std::abs(1.0 - std::exp(-1.0)), 0.63212055882855767, 1e-15,
             "|1 - e^{-1}|");
  check_near(b.one_minus_lo, std::cos(kPi / 4) / (1.0 + std::cos(kPi / 4)),
             1e-15, "lower envelope at z=1, alpha=pi/4");
  check_near(b.one_minus_hi, 2.0 / (1.0 + std::cos(kPi / 4)), 1e-15,
             "upper envelope at z=1, alpha=pi/4");
  check(b.one_minus_lo <= std::abs(1.0 - std::exp(-1.0)) &&
            std::abs(1.0 - std::exp(-1.0)) <= b.one_minus_hi,
        "|1-e^{-z}| inside the envelope at z=1");
  check_near(exp_bracket_bounds(cd(2.0, 0.0), kPi / 4).arg_gap, 0.0, kTight,
             "real z: argument gap vanishes");
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> umag(-3.0, 2.0), u01(-1.0, 1.0);
  long violations = 0;
  for (long k = 0; k < 10000; ++k) {
    const cd z = std::polar(std::pow(10.0, umag(rng)),
                            (kPi / 4) * 0.999999 * u01(rng));
    if (!exp_bracket_holds(z, kPi / 4)) ++violations;
  }
  check(violations == 0, "1e4 samples in S_{pi/4}: all four bounds hold");
  check_throws([] { exp_bracket_bounds(cd(-1.0, 2.0), kPi / 4); },
               "z outside the sector is a domain error");
}

void test_refined_gap() {
  section("refined argument gap");
  {
    const double g = refined_arg_gap(cd(1.0, 0.0), kPi / 2, kPi / 8);
    check(g >= -kPi / 8 - kTight && g < kPi / 2 - kPi / 8 + kTight,
          "z=1: gap inside [-beta, alpha-beta)");
    check_near(g, 0.0, kTight, "z=1: gap = 0");
  }
  {
    const cd z = std::polar(0.5, -kPi / 8);
    const double g = refined_arg_gap(z, kPi / 2, kPi / 8);
    check(g >= -kPi / 8 - kTight, "boundary ray arg z = -beta: gap >= -beta");
  }
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ualpha(0.05, kPi / 2), u01(0.0, 1.0),
      umag(-3.0, 1.2);
  long violations = 0, tested = 0;
  while (tested < 10000) {
    const double alpha = ualpha(rng);
    const double beta = 0.5 * alpha * u01(rng);
    const bool case1 = u01(rng) < 0.5;
    const double a = case1 ? -beta + (alpha - 1e-12) * u01(rng)
                           : beta - (alpha - 1e-12) * u01(rng);
    const cd z = std::polar(std::pow(10.0, umag(rng)), a);
    if (std::abs(z.imag()) > kPi) continue;
    const int c = refined_arg_case(z, alpha, beta);
    if (c == 0) continue;
    ++tested;
    const double g = refined_arg_gap(z, alpha, beta);
    const bool ok = c == 1 ? (g >= -beta - kTight && g < alpha - beta + kTight)
                           : (g > -alpha + beta - kTight && g <= beta + kTight);
    if (!ok) ++violations;
  }
  check(violations == 0, "1e4 constrained samples: zero violations");
  check_throws([] { refined_arg_gap(cd(0.1, 3.5), kPi / 2, 0.1); },
               "|Im z| > pi is a domain error");
}

void test_symbol() {
  section("determinant symbol");
  const SymbolParams p = unit_params(cd(0.0, 0.0));
  // direct evaluation of the displayed formula at z = 1
  const double root = std::sqrt(2.0);
  const double em = std::exp(-2.0 * root);
  const double expected = 1.0 + 2.0 * (1.0 - em) / (root * (1.0 + em));
  check_near(determinant_symbol(cd(1.0, 0.0), p).real(), expected, 1e-14,
             "f(1) for unit parameters, lambda = 0");
  check_near(expected, 2.25636690981088, 1e-12, "frozen value ~ 2.2564");
  check_near(determinant_symbol(cd(1.0, 0.0), p).imag(), 0.0, 1e-15,
             "f real on the real axis");
  bool all_above_one = true;
  for (double z = 1e-3; z < 1e6; z *= 3.7) {
    const cd f = determinant_symbol(cd(z, 0.0), p);
    all_above_one = all_above_one && f.real() > 1.0 && std::abs(f.imag()) < 1e-14;
  }
  check(all_above_one, "z real, lambda = 0: f real and > 1");
  const cd f_far = determinant_symbol(cd(1e6, 0.0), p);
  check(std::abs(f_far - cd(1.0, 0.0)) <= 3e-3, "|f - 1| <= 3e-3 at z = 1e6");

  // conjugate symmetry: f(conj z; conj lambda) = conj f(z; lambda)
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const cd z = std::polar(std::pow(10.0, -2.0 + 6.0 * u01(rng)),
                            0.3 * (2.0 * u01(rng) - 1.0));
    const cd lam = std::polar(std::pow(10.0, -1.0 + 5.0 * u01(rng)),
                              2.5 * (2.0 * u01(rng) - 1.0));
    SymbolParams pp = unit_params(lam);
    SymbolParams pc = unit_params(std::conj(lam));
    const cd a = determinant_symbol(z, pp);
    const cd b = std::conj(determinant_symbol(std::conj(z), pc));
    worst = std::max(worst, std::abs(a - b));
  }
  check(worst < 1e-13, "conjugate symmetry over 1e3 samples");

  // |f - 1| |z|^{1/2} bounded along fixed rays: ratio growth < 2x/decade
  bool decay_ok = true;
  for (const double a : {-0.3, -0.15, 0.0, 0.15, 0.3}) {
    double prev = -1.0;
    for (const double r : {1e2, 1e4, 1e6}) {
      const cd z = std::polar(r, a);
      const double val =
          std::abs(determinant_symbol(z, p) - cd(1.0, 0.0)) * std::sqrt(r);
      if (prev > 0.0 && val > 4.0 * prev + kTight) decay_ok = false;
      prev = val;
    }
  }
  check(decay_ok, "tail |f-1| |z|^{1/2} stable along rays (2 decades apart)");
}

void test_floor_certificate() {
  section("sector floor certification");
  SectorSpec spec;
  spec.epsilon0 = 0.35;
  spec.radius_min = 1e-3;
  spec.radius_max = 1e6;
  spec.n_radial = 40;
  spec.n_angular = 21;
  spec.big_R = 10.0;

  // real positive z, lambda = 0: |f| > 1 > sin(eps0/2)
  {
    std::vector<SymbolParams> ps = {unit_params(cd(0.0, 0.0))};
    SectorSpec line = spec;
    line.n_angular = 2;  // the two boundary rays only
    const auto cert = certify_symbol_floor(line, ps);
    check(cert.pass, "lambda = 0 scan passes");
    check(cert.min_abs_f > std::sin(spec.epsilon0 / 2.0),
          "margin above sin(eps0/2)");
  }
  {
    std::vector<SymbolParams> ps;
    for (const cd lam : sector_lambda_grid(spec.epsilon0, 7, 7, 1e-2, 1e5))
      ps.push_back(unit_params(lam));
    const auto cert = certify_symbol_floor(spec, ps);
    check(cert.pass, "2-D sector grid certifies the floor");
    check(std::abs(principal_arg(cert.argmin_z)) >
              0.8 * spec.epsilon0,
          "arg of the |f| minimizer sits near the boundary rays");
  }
  check_throws(
      [&] { certify_symbol_floor(spec, std::vector<SymbolParams>{}); },
      "empty sample set is a domain error");
}

void test_empirical_R() {
  section("empirical tail radius and admissibility");
  SymbolParams base = unit_params(cd(0.0, 0.0));
  base.q = 0.01;
  base.d_minus = 0.10;
  base.d_plus = 0.12;
  base.r_minus = 0.04;
  base.r_plus = 0.06;
  base.ell = 0.9;
  base.L = 1.1;
  const double eps0 = 0.40;
  const auto lambdas = sector_lambda_grid(eps0, 7, 9, 1e-2, 1e6);
  const double big_r = empirical_big_R(eps0, base, lambdas);
  check(big_r > 0.0, "empirical R positive");
  const double bound = admissible_epsilon0(big_r, base.ell, base.L);
  check(eps0 <= bound, "default-config epsilon0 admissible");
  // the bound shrinks as R grows
  check(admissible_epsilon0(10.0 * big_r, base.ell, base.L) < bound,
        "bound decreases in R");
}

}  // namespace

int main() {
  test_principal_arg();
  test_shift_monotonicity();
  test_sum_sandwich();
  test_modulus_bound();
  test_exp_bracket();
  test_refined_gap();
  test_symbol();
  test_floor_certificate();
  test_empirical_R();
  return testsup::finish();
}
