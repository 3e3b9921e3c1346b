#include "semiperm/grid.hpp"

#include <cmath>
#include <random>

namespace semiperm::grid {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

void HabitatConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string("HabitatConfig: field ") + name +
                                  " must be > 0");
  };
  positive(ell, "ell");
  positive(L, "L");
  positive(d_minus, "d_minus");
  positive(d_plus, "d_plus");
  positive(r_minus, "r_minus");
  positive(r_plus, "r_plus");
  positive(q, "q");
  if (n_transversal < 1)
    throw std::invalid_argument(
        "HabitatConfig: field n_transversal must be >= 1");
  if (n_long_minus < 3 || n_long_plus < 3)
    throw std::invalid_argument(
        "HabitatConfig: fields n_long_minus, n_long_plus must be >= 3");
}

NormKind norm_kind_from_string(const std::string& s) {
  if (s == "p1") return NormKind::p1;
  if (s == "p2") return NormKind::p2;
  if (s == "pinf") return NormKind::pinf;
  throw std::invalid_argument("unknown norm kind: " + s);
}

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::p1: return "p1";
    case NormKind::p2: return "p2";
    default: return "pinf";
  }
}

GridFunction GridFunction::zero(const HabitatConfig& cfg) {
  GridFunction f;
  f.minus = MatrixXcd::Zero(cfg.n_long_minus, cfg.n_transversal);
  f.plus = MatrixXcd::Zero(cfg.n_long_plus, cfg.n_transversal);
  return f;
}

GridFunction GridFunction::sample(
    const HabitatConfig& cfg, const std::function<cd(double, double)>& u) {
  GridFunction f = zero(cfg);
  for (int j = 0; j < cfg.n_long_minus; ++j)
    for (int i = 0; i < cfg.n_transversal; ++i)
      f.minus(j, i) = u(cfg.x_minus(j), cfg.y(i));
  for (int j = 0; j < cfg.n_long_plus; ++j)
    for (int i = 0; i < cfg.n_transversal; ++i)
      f.plus(j, i) = u(cfg.x_plus(j), cfg.y(i));
  return f;
}

GridFunction GridFunction::random_smooth(const HabitatConfig& cfg,
                                         uint64_t seed, int n_modes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  struct Mode {
    double cm_re, cm_im, cp_re, cp_im;
  };
  std::vector<Mode> modes(static_cast<size_t>(n_modes) * n_modes);
  for (auto& m : modes) m = {unit(rng), unit(rng), unit(rng), unit(rng)};

  auto field = [&](double x, double y, bool minus_side) {
    cd v(0.0, 0.0);
    for (int kx = 1; kx <= n_modes; ++kx)
      for (int ky = 1; ky <= n_modes; ++ky) {
        const Mode& m = modes[size_t(kx - 1) * n_modes + (ky - 1)];
        const double sx = minus_side
                              ? std::sin(kx * kPi * (x + cfg.ell) / cfg.ell)
                              : std::sin(kx * kPi * x / cfg.L);
        const double sy = std::sin(ky * kPi * y);
        v += (minus_side ? cd(m.cm_re, m.cm_im) : cd(m.cp_re, m.cp_im)) * sx *
             sy / double(kx * kx + ky * ky);
      }
    return v;
  };

  GridFunction f = zero(cfg);
  for (int j = 0; j < cfg.n_long_minus; ++j)
    for (int i = 0; i < cfg.n_transversal; ++i)
      f.minus(j, i) = field(cfg.x_minus(j), cfg.y(i), true);
  for (int j = 0; j < cfg.n_long_plus; ++j)
    for (int i = 0; i < cfg.n_transversal; ++i)
      f.plus(j, i) = field(cfg.x_plus(j), cfg.y(i), false);
  return f;
}

void GridFunction::check_shape(const HabitatConfig& cfg) const {
  if (minus.rows() != cfg.n_long_minus || minus.cols() != cfg.n_transversal ||
      plus.rows() != cfg.n_long_plus || plus.cols() != cfg.n_transversal)
    throw std::invalid_argument("GridFunction: shape mismatch with config");
}

namespace {

double trap_weight(int j, int m) { return (j == 0 || j == m - 1) ? 0.5 : 1.0; }

}  // namespace

double norm(const GridFunction& f, const HabitatConfig& cfg, NormKind kind) {
  f.check_shape(cfg);
  const double h = cfg.h();
  const double dxm = cfg.dx_minus(), dxp = cfg.dx_plus();
  double acc = 0.0;
  for (int j = 0; j < cfg.n_long_minus; ++j) {
    const double w = dxm * trap_weight(j, cfg.n_long_minus) * h;
    for (int i = 0; i < cfg.n_transversal; ++i) {
      const double a = std::abs(f.minus(j, i));
      if (kind == NormKind::p1) acc += w * a;
      else if (kind == NormKind::p2) acc += w * a * a;
      else acc = std::max(acc, a);
    }
  }
  for (int j = 0; j < cfg.n_long_plus; ++j) {
    const double w = dxp * trap_weight(j, cfg.n_long_plus) * h;
    for (int i = 0; i < cfg.n_transversal; ++i) {
      const double a = std::abs(f.plus(j, i));
      if (kind == NormKind::p1) acc += w * a;
      else if (kind == NormKind::p2) acc += w * a * a;
      else acc = std::max(acc, a);
    }
  }
  return kind == NormKind::p2 ? std::sqrt(acc) : acc;
}

cd inner_product(const GridFunction& f, const GridFunction& g,
                 const HabitatConfig& cfg) {
  f.check_shape(cfg);
  g.check_shape(cfg);
  const double h = cfg.h();
  cd acc(0.0, 0.0);
  for (int j = 0; j < cfg.n_long_minus; ++j) {
    const double w = cfg.dx_minus() * trap_weight(j, cfg.n_long_minus) * h;
    for (int i = 0; i < cfg.n_transversal; ++i)
      acc += w * f.minus(j, i) * std::conj(g.minus(j, i));
  }
  for (int j = 0; j < cfg.n_long_plus; ++j) {
    const double w = cfg.dx_plus() * trap_weight(j, cfg.n_long_plus) * h;
    for (int i = 0; i < cfg.n_transversal; ++i)
      acc += w * f.plus(j, i) * std::conj(g.plus(j, i));
  }
  return acc;
}

GridFunction conj(const GridFunction& f) {
  GridFunction g;
  g.minus = f.minus.conjugate();
  g.plus = f.plus.conjugate();
  return g;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  GridFunction c;
  c.minus = a.minus + b.minus;
  c.plus = a.plus + b.plus;
  return c;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  GridFunction c;
  c.minus = a.minus - b.minus;
  c.plus = a.plus - b.plus;
  return c;
}

GridFunction operator*(cd s, const GridFunction& a) {
  GridFunction c;
  c.minus = s * a.minus;
  c.plus = s * a.plus;
  return c;
}

}  // namespace semiperm::grid
