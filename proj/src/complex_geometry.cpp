#include "semiperm/complex_geometry.hpp"

#include <algorithm>
#include <cmath>

namespace semiperm::sector {

double principal_arg(cd z) {
  if (z == cd(0.0, 0.0))
    throw std::domain_error("principal_arg: z = 0");
  double a = std::arg(z);
  if (a <= -kPi) a = kPi;  // branch convention: arg in (-pi, pi]
  return a;
}

bool in_sector(cd z, double omega) {
  if (z == cd(0.0, 0.0)) return false;
  if (omega == 0.0) return z.imag() == 0.0 && z.real() > 0.0;
  return std::abs(principal_arg(z)) < omega;
}

bool in_sector_or_zero(cd z, double omega) {
  return z == cd(0.0, 0.0) || in_sector(z, omega);
}

bool shift_monotonicity_holds(cd z, double c) {
  if (z.imag() == 0.0)
    throw std::domain_error("shift_monotonicity_holds: z is real");
  if (c == 0.0)
    throw std::domain_error("shift_monotonicity_holds: c = 0");
  if (z + c == cd(0.0, 0.0))
    throw std::domain_error("shift_monotonicity_holds: z + c = 0");
  const double a_z = std::abs(principal_arg(z));
  const double a_zc = std::abs(principal_arg(z + c));
  if (c > 0.0)
    return 0.0 < a_zc + kSlack && a_zc < a_z + kSlack && a_z < kPi + kSlack;
  return 0.0 < a_z + kSlack && a_z < a_zc + kSlack && a_zc < kPi + kSlack;
}

SandwichOutcome sum_arg_sandwich(cd z1, cd z2) {
  if (z1 == cd(0.0, 0.0) || z2 == cd(0.0, 0.0))
    throw std::domain_error("sum_arg_sandwich: z1, z2 must be nonzero");
  if (z1 + z2 == cd(0.0, 0.0))
    throw std::domain_error("sum_arg_sandwich: z1 + z2 = 0");
  const double a1 = principal_arg(z1);
  const double a2 = principal_arg(z2);
  // Either half-plane ordering hypothesis may apply; arg(z2) = 0 belongs to
  // the lower case (the upper one degenerates to an empty range there).
  const bool hyp_upper =
      a2 >= 0.0 && principal_arg(-z2) - kSlack <= a1 && a1 <= a2 + kSlack;
  const bool hyp_lower = a2 <= 0.0 && a1 <= a2 + kSlack;
  if (!hyp_upper && !hyp_lower) return SandwichOutcome::hypothesis_not_met;
  const double as = principal_arg(z1 + z2);
  return (a1 <= as + kSlack && as <= a2 + kSlack) ? SandwichOutcome::holds
                                                  : SandwichOutcome::violated;
}

ModulusBound sum_modulus_lower_bound(cd z1, cd z2) {
  if (z1 == cd(0.0, 0.0) || z2 == cd(0.0, 0.0))
    throw std::domain_error("sum_modulus_lower_bound: z1, z2 must be nonzero");
  const double half = 0.5 * (principal_arg(z1) - principal_arg(z2));
  return {std::abs(z1 + z2),
          (std::abs(z1) + std::abs(z2)) * std::abs(std::cos(half))};
}

ExpBracketBounds exp_bracket_bounds(cd z, double alpha) {
  if (!(alpha > 0.0 && alpha < kPi / 2))
    throw std::domain_error("exp_bracket_bounds: alpha outside (0, pi/2)");
  if (!in_sector(z, alpha))
    throw std::domain_error("exp_bracket_bounds: z outside S_alpha");
  const cd em = std::exp(-z);
  const double gap =
      std::abs(principal_arg(1.0 - em) - principal_arg(1.0 + em));
  const double ca = std::cos(alpha);
  const double az = std::abs(z);
  return {gap, 1.0 - std::exp(-kPi / (2.0 * std::tan(alpha))),
          az * ca / (1.0 + az * ca), 2.0 * az / (1.0 + az * ca)};
}

bool exp_bracket_holds(cd z, double alpha) {
  const ExpBracketBounds b = exp_bracket_bounds(z, alpha);
  const double one_minus = std::abs(1.0 - std::exp(-z));
  const double one_plus = std::abs(1.0 + std::exp(-z));
  return b.arg_gap < alpha + kSlack && one_plus >= b.one_plus_floor - kSlack &&
         one_minus >= b.one_minus_lo - kSlack &&
         one_minus <= b.one_minus_hi + kSlack;
}

int refined_arg_case(cd z, double alpha, double beta) {
  const double a = principal_arg(z);
  if (-beta - kSlack <= a && a < alpha - beta + kSlack) return 1;
  if (-alpha + beta - kSlack < a && a <= beta + kSlack) return 2;
  return 0;
}

double refined_arg_gap(cd z, double alpha, double beta) {
  if (z == cd(0.0, 0.0))
    throw std::domain_error("refined_arg_gap: z = 0");
  if (!(alpha > 0.0 && alpha <= kPi / 2))
    throw std::domain_error("refined_arg_gap: alpha outside (0, pi/2]");
  if (!(beta >= 0.0 && beta <= alpha / 2))
    throw std::domain_error("refined_arg_gap: beta outside [0, alpha/2]");
  if (std::abs(z.imag()) > kPi)
    throw std::domain_error("refined_arg_gap: |Im z| > pi");
  if (refined_arg_case(z, alpha, beta) == 0)
    throw std::domain_error("refined_arg_gap: arg z outside both case ranges");
  const cd em = std::exp(-z);
  return principal_arg(1.0 - em) - principal_arg(1.0 + em);
}

// ---------------------------------------------------------------------------

void SymbolParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string("SymbolParams: field ") + name +
                                  " must be > 0");
  };
  positive(ell, "ell");
  positive(L, "L");
  positive(d_minus, "d_minus");
  positive(d_plus, "d_plus");
  positive(r_minus, "r_minus");
  positive(r_plus, "r_plus");
  positive(q, "q");
}

cd symbol_bracket_term(cd w, double c, double q) {
  const cd root = std::sqrt(w);
  const cd em = std::exp(-c * root);
  return q * (1.0 - em) / (root * (1.0 + em));
}

cd determinant_symbol(cd z, const SymbolParams& p) {
  const cd wp = z + p.lambda_plus() + p.rho_plus();
  const cd wm = z + p.lambda_minus() + p.rho_minus();
  return 1.0 + symbol_bracket_term(wp, 2.0 * p.L, p.q_plus()) +
         symbol_bracket_term(wm, 2.0 * p.ell, p.q_minus());
}

void SectorSpec::validate() const {
  if (!(epsilon0 > 0.0 && epsilon0 < kPi / 2))
    throw std::invalid_argument("SectorSpec: field epsilon0 outside (0, pi/2)");
  if (!(radius_min > 0.0 && radius_max > 0.0 && radius_min < radius_max))
    throw std::invalid_argument(
        "SectorSpec: need 0 < radius_min < radius_max");
  if (n_radial < 2 || n_angular < 2)
    throw std::invalid_argument("SectorSpec: sample counts must be >= 2");
  if (!(big_R > 0.0))
    throw std::invalid_argument("SectorSpec: field big_R must be > 0");
}

std::vector<cd> sector_z_grid(const SectorSpec& spec) {
  spec.validate();
  std::vector<cd> zs;
  zs.reserve(static_cast<size_t>(spec.n_radial) * spec.n_angular);
  const double lr0 = std::log(spec.radius_min);
  const double lr1 = std::log(spec.radius_max);
  for (int i = 0; i < spec.n_radial; ++i) {
    const double r =
        std::exp(lr0 + (lr1 - lr0) * i / double(spec.n_radial - 1));
    for (int j = 0; j < spec.n_angular; ++j) {
      const double a =
          -spec.epsilon0 + 2.0 * spec.epsilon0 * j / double(spec.n_angular - 1);
      zs.push_back(std::polar(r, a));
    }
  }
  return zs;
}

std::vector<cd> sector_lambda_grid(double epsilon0, int n_rays, int n_radii,
                                   double r_min, double r_max) {
  std::vector<cd> ls;
  ls.push_back(cd(0.0, 0.0));
  const double amax = (kPi - epsilon0) * (1.0 - 1e-9);
  for (int i = 0; i < n_rays; ++i) {
    const double a = -amax + 2.0 * amax * i / double(n_rays - 1);
    for (int j = 0; j < n_radii; ++j) {
      const double r =
          std::exp(std::log(r_min) +
                   (std::log(r_max) - std::log(r_min)) * j / double(n_radii - 1));
      ls.push_back(std::polar(r, a));
    }
  }
  return ls;
}

FloorCertificate certify_symbol_floor(const SectorSpec& spec,
                                      const std::vector<SymbolParams>& p_grid) {
  spec.validate();
  if (p_grid.empty())
    throw std::domain_error("certify_symbol_floor: empty parameter grid");
  const std::vector<cd> zs = sector_z_grid(spec);
  if (zs.empty()) throw std::domain_error("certify_symbol_floor: empty z grid");

  FloorCertificate cert;
  cert.floor = std::sin(spec.epsilon0 / 2.0);
  cert.min_abs_f = std::numeric_limits<double>::infinity();
  cert.samples = 0;
  for (const SymbolParams& p : p_grid) {
    if (!in_sector_or_zero(p.lambda, kPi - spec.epsilon0))
      throw std::domain_error(
          "certify_symbol_floor: lambda outside S_{pi-eps0} u {0}");
    for (const cd z : zs) {
      const double a = std::abs(determinant_symbol(z, p));
      ++cert.samples;
      if (a < cert.min_abs_f) {
        cert.min_abs_f = a;
        cert.argmin_z = z;
        cert.argmin_lambda = p.lambda;
      }
    }
  }
  cert.pass = cert.min_abs_f > cert.floor;
  return cert;
}

double empirical_big_R(double epsilon0, const SymbolParams& base,
                       const std::vector<cd>& lambdas) {
  const double threshold = 0.5 * (1.0 - std::sin(epsilon0 / 2.0));
  double last_violation = 0.0;
  const int n_steps = 241;  // 1e-2 .. 1e10, 20 per decade
  for (int i = 0; i < n_steps; ++i) {
    const double r = std::pow(10.0, -2.0 + i * 0.05);
    for (const double sgn : {-1.0, 1.0}) {
      const cd z = std::polar(r, sgn * epsilon0);
      for (const cd lam : lambdas) {
        SymbolParams p = base;
        p.lambda = lam;
        const cd wp = z + p.lambda_plus() + p.rho_plus();
        const cd wm = z + p.lambda_minus() + p.rho_minus();
        const double tp = std::abs(symbol_bracket_term(wp, 2.0 * p.L, p.q_plus()));
        const double tm =
            std::abs(symbol_bracket_term(wm, 2.0 * p.ell, p.q_minus()));
        if (tp >= threshold || tm >= threshold) last_violation = r;
      }
    }
  }
  return std::max(2.0 * last_violation, 1e-2);
}

double admissible_epsilon0(double big_R, double ell, double L) {
  const double m = std::min(1.0 / (L * L), 1.0 / (ell * ell));
  return std::atan(kPi * kPi / (2.0 * big_R) * m);
}

}  // namespace semiperm::sector
