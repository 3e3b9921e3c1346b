#include "semiperm/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "semiperm/complex_geometry.hpp"
#include "semiperm/direct2d.hpp"
#include "semiperm/operator_core.hpp"
#include "semiperm/sweep.hpp"
#include "semiperm/transmission.hpp"

namespace semiperm::bench {

namespace {

using cd = std::complex<double>;
using grid::GridFunction;
using grid::HabitatConfig;
using grid::NormKind;
using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

template <class F>
void parallel_for(int n, int jobs, F&& body) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < std::min(jobs, n); ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

sector::SymbolParams symbol_params(const HabitatConfig& h, cd lambda) {
  sector::SymbolParams p;
  p.ell = h.ell;
  p.L = h.L;
  p.d_minus = h.d_minus;
  p.d_plus = h.d_plus;
  p.r_minus = h.r_minus;
  p.r_plus = h.r_plus;
  p.q = h.q;
  p.lambda = lambda;
  return p;
}

std::string describe(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << ", ";
    first = false;
    os << k << "=" << format_g17(v);
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// propositions suite: criterion 1 (property sweeps) + criterion 2 (floor)
// ---------------------------------------------------------------------------

struct PropRow {
  std::string name;
  long samples = 0;
  long violations = 0;
  double min_slack = std::numeric_limits<double>::infinity();
};

PropRow sweep_shift_monotonicity(long n, std::mt19937_64& rng) {
  PropRow row{"arg_shift_monotonicity"};
  std::uniform_real_distribution<double> uang(-kPi, kPi), umag(-3.0, 3.0),
      ucmag(-3.0, 2.0), ucoin(0.0, 1.0);
  while (row.samples < n) {
    const cd z = std::polar(std::pow(10.0, umag(rng)), uang(rng));
    if (z.imag() == 0.0) continue;
    const double c =
        (ucoin(rng) < 0.5 ? 1.0 : -1.0) * std::pow(10.0, ucmag(rng));
    if (z + c == cd(0.0, 0.0)) continue;
    ++row.samples;
    if (!sector::shift_monotonicity_holds(z, c)) ++row.violations;
    const double az = std::abs(sector::principal_arg(z));
    const double azc = std::abs(sector::principal_arg(z + c));
    const double inner = c > 0.0 ? az - azc : azc - az;
    const double outer = c > 0.0 ? std::min(azc, kPi - az) : std::min(az, kPi - azc);
    row.min_slack = std::min({row.min_slack, inner, outer});
  }
  return row;
}

PropRow sweep_sum_sandwich(long n, std::mt19937_64& rng) {
  PropRow row{"arg_sum_sandwich"};
  std::uniform_real_distribution<double> uang(-kPi, kPi), umag(-2.0, 2.0),
      u01(0.0, 1.0);
  while (row.samples < n) {
    const double a2 = uang(rng);
    const double a1 = a2 >= 0.0 ? (a2 - kPi) + kPi * u01(rng)
                                : -kPi + (a2 + kPi) * u01(rng);
    const cd z1 = std::polar(std::pow(10.0, umag(rng)), a1);
    const cd z2 = std::polar(std::pow(10.0, umag(rng)), a2);
    if (z1 + z2 == cd(0.0, 0.0)) continue;
    const auto outcome = sector::sum_arg_sandwich(z1, z2);
    if (outcome == sector::SandwichOutcome::hypothesis_not_met) continue;
    ++row.samples;
    if (outcome != sector::SandwichOutcome::holds) ++row.violations;
    const double as = sector::principal_arg(z1 + z2);
    row.min_slack = std::min({row.min_slack,
                              as - sector::principal_arg(z1),
                              sector::principal_arg(z2) - as});
  }
  return row;
}

PropRow sweep_modulus_bound(long n, std::mt19937_64& rng) {
  PropRow row{"sum_modulus_half_angle"};
  std::uniform_real_distribution<double> uang(-kPi, kPi), umag(-3.0, 3.0);
  while (row.samples < n) {
    const cd z1 = std::polar(std::pow(10.0, umag(rng)), uang(rng));
    const cd z2 = std::polar(std::pow(10.0, umag(rng)), uang(rng));
    const auto b = sector::sum_modulus_lower_bound(z1, z2);
    ++row.samples;
    if (b.lhs < b.rhs - 1e-12) ++row.violations;
    row.min_slack = std::min(row.min_slack, b.lhs - b.rhs);
  }
  return row;
}

PropRow sweep_exp_bracket(long n, std::mt19937_64& rng) {
  PropRow row{"exp_bracket_bounds"};
  std::uniform_real_distribution<double> ualpha(0.05, kPi / 2 - 0.05),
      umag(-3.0, 2.0), u01(-1.0, 1.0);
  while (row.samples < n) {
    const double alpha = ualpha(rng);
    const cd z = std::polar(std::pow(10.0, umag(rng)),
                            alpha * 0.999999 * u01(rng));
    ++row.samples;
    if (!sector::exp_bracket_holds(z, alpha)) ++row.violations;
    const auto b = sector::exp_bracket_bounds(z, alpha);
    const double one_minus = std::abs(1.0 - std::exp(-z));
    const double one_plus = std::abs(1.0 + std::exp(-z));
    row.min_slack = std::min({row.min_slack, alpha - b.arg_gap,
                              one_plus - b.one_plus_floor,
                              one_minus - b.one_minus_lo,
                              b.one_minus_hi - one_minus});
  }
  return row;
}

PropRow sweep_refined_gap(long n, std::mt19937_64& rng) {
  PropRow row{"refined_arg_gap"};
  std::uniform_real_distribution<double> ualpha(0.05, kPi / 2), u01(0.0, 1.0),
      umag(-3.0, 1.2);
  while (row.samples < n) {
    const double alpha = ualpha(rng);
    const double beta = 0.5 * alpha * u01(rng);
    const bool case1 = u01(rng) < 0.5;
    const double a = case1 ? -beta + (alpha - 1e-12) * u01(rng)
                           : beta - (alpha - 1e-12) * u01(rng);
    const cd z = std::polar(std::pow(10.0, umag(rng)), a);
    if (std::abs(z.imag()) > kPi) continue;
    if (sector::refined_arg_case(z, alpha, beta) == 0) continue;
    const double gap = sector::refined_arg_gap(z, alpha, beta);
    ++row.samples;
    const int c = sector::refined_arg_case(z, alpha, beta);
    const bool ok =
        c == 1 ? gap >= -beta - 1e-12 && gap < alpha - beta + 1e-12
               : gap > -alpha + beta - 1e-12 && gap <= beta + 1e-12;
    if (!ok) ++row.violations;
    if (c == 1)
      row.min_slack =
          std::min({row.min_slack, gap + beta, alpha - beta - gap});
    else
      row.min_slack =
          std::min({row.min_slack, gap + alpha - beta, beta - gap});
  }
  return row;
}

SuiteOutput run_propositions_suite(const RunConfig& cfg) {
  SuiteOutput out;
  out.name = "propositions";
  std::ostringstream csv;
  csv << "name,samples,violations,min_slack\n";

  {
    Stopwatch sw;
    std::mt19937_64 rng(cfg.seed);
    const long n = 100000;
    std::vector<PropRow> rows;
    rows.push_back(sweep_shift_monotonicity(n, rng));
    rows.push_back(sweep_sum_sandwich(n, rng));
    rows.push_back(sweep_modulus_bound(n, rng));
    rows.push_back(sweep_exp_bracket(n, rng));
    rows.push_back(sweep_refined_gap(n, rng));
    long violations = 0;
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
      violations += r.violations;
      min_slack = std::min(min_slack, r.min_slack);
      csv << r.name << "," << r.samples << "," << r.violations << ","
          << format_g17(r.min_slack) << "\n";
    }
    CriterionResult c;
    c.key = "property_suite";
    c.limit_s = 10.0;
    c.runtime_s = sw.seconds();
    c.pass = violations == 0 && c.runtime_s < c.limit_s;
    c.detail = "violations=" + std::to_string(violations) + ", " +
               describe({{"min_slack", min_slack}});
    out.criteria.push_back(c);
  }

  {
    Stopwatch sw;
    const double eps0 = cfg.sector_spec.epsilon0;
    std::vector<sector::SymbolParams> p_grid;
    for (const cd lam : sector::sector_lambda_grid(eps0, 9, 11, 1e-2, 1e6))
      p_grid.push_back(symbol_params(cfg.habitat, lam));
    const auto cert = sector::certify_symbol_floor(cfg.sector_spec, p_grid);
    CriterionResult c;
    c.key = "symbol_floor";
    c.limit_s = 30.0;
    c.runtime_s = sw.seconds();
    c.pass = cert.pass && c.runtime_s < c.limit_s;
    c.detail = describe({{"min_abs_f", cert.min_abs_f},
                         {"floor", cert.floor},
                         {"margin", cert.min_abs_f - cert.floor},
                         {"argmin_z_re", cert.argmin_z.real()},
                         {"argmin_z_im", cert.argmin_z.imag()}});
    csv << "symbol_floor," << cert.samples << "," << (cert.pass ? 0 : 1) << ","
        << format_g17(cert.min_abs_f - cert.floor) << "\n";
    out.criteria.push_back(c);
  }

  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// operator suite: criterion 3
// ---------------------------------------------------------------------------

SuiteOutput run_operator_suite(const RunConfig& cfg) {
  SuiteOutput out;
  out.name = "operator";
  Stopwatch sw;
  const double eps0 = cfg.sector_spec.epsilon0;
  const std::vector<cd> lambdas = sweep::sweep_lambda_grid(eps0);
  const double bound = 1.0 / std::sin(eps0 / 2.0) + 1e-6;

  struct Row {
    cd lambda;
    double spec_norm, dense_norm, gap, det_resid;
  };
  std::vector<Row> rows(lambdas.size());
  parallel_for(int(lambdas.size()), cfg.jobs, [&](int i) {
    const auto ws_s = transmission::assemble_workspace(
        cfg.habitat, lambdas[i], eps0, transmission::Path::spectral);
    const auto ws_d = transmission::assemble_workspace(
        cfg.habitat, lambdas[i], eps0, transmission::Path::dense);
    Row r;
    r.lambda = lambdas[i];
    r.spec_norm = transmission::dstar_inverse_norm(ws_s);
    r.dense_norm = transmission::dstar_inverse_norm(ws_d);
    r.gap = std::abs(r.spec_norm - r.dense_norm);
    r.det_resid = std::max(transmission::det_identity_residual(ws_s),
                           transmission::det_identity_residual(ws_d));
    rows[i] = r;
  });

  double worst_norm = 0.0, worst_gap = 0.0, worst_det = 0.0;
  std::ostringstream csv;
  csv << "lambda_re,lambda_im,dstar_norm,dstar_bound,dense_gap,det_identity\n";
  for (const Row& r : rows) {
    worst_norm = std::max(worst_norm, r.spec_norm);
    worst_gap = std::max(worst_gap, r.gap);
    worst_det = std::max(worst_det, r.det_resid);
    csv << format_g17(r.lambda.real()) << "," << format_g17(r.lambda.imag())
        << "," << format_g17(r.spec_norm) << "," << format_g17(bound) << ","
        << format_g17(r.gap) << "," << format_g17(r.det_resid) << "\n";
  }

  CriterionResult c;
  c.key = "determinant_inverse_norm";
  c.runtime_s = sw.seconds();
  c.pass = worst_norm <= bound && worst_gap <= 1e-9 && worst_det <= 1e-9;
  c.detail = describe({{"max_dstar_norm", worst_norm},
                       {"bound", bound},
                       {"max_dense_gap", worst_gap},
                       {"max_det_identity_residual", worst_det}});
  out.criteria.push_back(c);
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// resolvent suite: criterion 4
// ---------------------------------------------------------------------------

double fit_order(const std::vector<double>& n_values,
                 const std::vector<double>& errors) {
  // least-squares slope of log(error) against log(n); order = -slope
  const size_t n = n_values.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += std::log(n_values[i]);
    my += std::log(std::max(errors[i], 1e-300));
  }
  mx /= double(n);
  my /= double(n);
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = std::log(n_values[i]) - mx;
    sxy += dx * (std::log(std::max(errors[i], 1e-300)) - my);
    sxx += dx * dx;
  }
  return -sxy / sxx;
}

SuiteOutput run_resolvent_suite(const RunConfig& cfg) {
  SuiteOutput out;
  out.name = "resolvent";
  Stopwatch sw;
  const double eps0 = cfg.sector_spec.epsilon0;
  const cd lambda(1.5, 2.5);

  std::vector<double> nt = {16, 32, 64};
  std::vector<double> rel_diffs, ode_resids, iface_resids;
  double worst_dirichlet = 0.0;
  std::ostringstream csv;
  csv << "n_transversal,n_long,rel_diff,ode_minus,ode_plus,interface_minus,"
         "interface_plus,dirichlet_minus,dirichlet_plus\n";

  for (const double ntv : nt) {
    HabitatConfig h = cfg.habitat;
    h.n_transversal = int(ntv);
    h.n_long_minus = 8 * int(ntv) + 1;
    h.n_long_plus = 8 * int(ntv) + 1;
    const GridFunction f = GridFunction::random_smooth(h, cfg.seed + 7);

    const auto ws = transmission::assemble_workspace(h, lambda, eps0);
    const GridFunction w_explicit = transmission::apply_resolvent(ws, f);
    const auto op = direct2d::build_2d_operator(h);
    const GridFunction w_oracle = direct2d::direct_resolvent_solve(op, lambda, f);

    const double rel = grid::norm(w_explicit - w_oracle, h, NormKind::p2) /
                       grid::norm(w_oracle, h, NormKind::p2);
    const auto res = transmission::resolvent_residuals(ws, f, w_explicit);
    rel_diffs.push_back(rel);
    ode_resids.push_back(std::max(res.ode_minus, res.ode_plus));
    iface_resids.push_back(std::max(res.interface_minus, res.interface_plus));
    worst_dirichlet = std::max(
        {worst_dirichlet, res.dirichlet_minus, res.dirichlet_plus});
    csv << int(ntv) << "," << h.n_long_minus << "," << format_g17(rel) << ","
        << format_g17(res.ode_minus) << "," << format_g17(res.ode_plus) << ","
        << format_g17(res.interface_minus) << ","
        << format_g17(res.interface_plus) << ","
        << format_g17(res.dirichlet_minus) << ","
        << format_g17(res.dirichlet_plus) << "\n";
  }

  const double order_diff = fit_order(nt, rel_diffs);
  const double order_ode = fit_order(nt, ode_resids);
  const double order_iface = fit_order(nt, iface_resids);

  CriterionResult c;
  c.key = "resolvent_oracle_convergence";
  c.limit_s = 120.0;
  c.runtime_s = sw.seconds();
  const bool orders_ok = order_diff >= 1.7 && order_diff <= 2.3 &&
                         order_ode >= 1.7 && order_ode <= 2.3 &&
                         order_iface >= 1.7 && order_iface <= 2.3;
  c.pass = orders_ok && worst_dirichlet <= 1e-12 && c.runtime_s < c.limit_s;
  c.detail = describe({{"order_vs_oracle", order_diff},
                       {"order_ode_residual", order_ode},
                       {"order_interface_residual", order_iface},
                       {"max_dirichlet_residual", worst_dirichlet},
                       {"finest_rel_diff", rel_diffs.back()}});
  out.criteria.push_back(c);
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// sweep suite: criteria 5 and 6
// ---------------------------------------------------------------------------

SuiteOutput run_sweep_suite(const RunConfig& cfg) {
  SuiteOutput out;
  out.name = "sweep";
  const double eps0 = cfg.sector_spec.epsilon0;
  const std::vector<cd> lambdas = sweep::sweep_lambda_grid(eps0);

  auto sweep_once = [&](const HabitatConfig& h) {
    std::vector<sweep::SweepRecord> recs(lambdas.size());
    parallel_for(int(lambdas.size()), cfg.jobs, [&](int i) {
      recs[i] =
          sweep::resolvent_norm(h, lambdas[i], eps0, NormKind::p2,
                                cfg.seed + uint64_t(i));
    });
    return recs;
  };

  {
    Stopwatch sw;
    const auto recs = sweep_once(cfg.habitat);
    const auto fit = sweep::fit_sector_constant(recs);

    HabitatConfig doubled = cfg.habitat;
    doubled.n_transversal *= 2;
    const auto recs2 = sweep_once(doubled);
    const auto fit2 = sweep::fit_sector_constant(recs2);

    std::vector<double> scaled;
    for (const auto& r : recs)
      if (r.lambda != cd(0.0, 0.0)) scaled.push_back(r.scaled);
    std::sort(scaled.begin(), scaled.end());
    const double median = scaled[scaled.size() / 2];
    const double ratio = scaled.back() / median;
    double slope_lo = 0.0, slope_hi = -2.0;
    for (const double s : fit.ray_slopes) {
      slope_lo = std::min(slope_lo, s);
      slope_hi = std::max(slope_hi, s);
    }
    const double chat_change = std::abs(fit2.c_hat - fit.c_hat) / fit.c_hat;

    std::ostringstream csv;
    csv << "lambda_re,lambda_im,norm_kind,norm,scaled,wall_time_ms\n";
    for (const auto& r : recs)
      csv << format_g17(r.lambda.real()) << "," << format_g17(r.lambda.imag())
          << "," << grid::to_string(r.norm_kind) << ","
          << format_g17(r.norm_estimate) << "," << format_g17(r.scaled) << ","
          << format_g17(r.wall_time_ms) << "\n";
    out.csv = csv.str();

    CriterionResult c;
    c.key = "generation_sector_estimate";
    c.limit_s = 300.0;
    c.runtime_s = sw.seconds();
    c.pass = ratio <= 10.0 && slope_lo >= -1.1 && slope_hi <= -0.9 &&
             chat_change < 0.25 && c.runtime_s < c.limit_s;
    c.detail = describe({{"max_over_median_scaled", ratio},
                         {"slope_min", slope_lo},
                         {"slope_max", slope_hi},
                         {"c_hat", fit.c_hat},
                         {"c_hat_doubled", fit2.c_hat},
                         {"c_hat_change", chat_change}});
    out.criteria.push_back(c);
  }

  {
    Stopwatch sw;
    const double ray = kPi - eps0 - 0.01;
    const std::vector<double> rays = {0.0, ray, -ray};
    const std::vector<double> radii = {10.0, 1e3, 1e5};
    std::vector<cd> scan_lambdas;
    for (const double a : rays)
      for (const double r : radii) scan_lambdas.push_back(std::polar(r, a));

    // normalized ratios per map; 0 = U minus, 1 = U plus, 2..9 = the eight
    // boundary-term maps
    std::vector<std::array<double, 10>> normalized(scan_lambdas.size());
    parallel_for(int(scan_lambdas.size()), cfg.jobs, [&](int i) {
      const cd lam = scan_lambdas[i];
      const auto um = sweep::convolution_norm_scan(
          cfg.habitat, lam, eps0, transmission::Side::minus, 64, cfg.seed + 3);
      const auto up = sweep::convolution_norm_scan(
          cfg.habitat, lam, eps0, transmission::Side::plus, 64, cfg.seed + 4);
      const auto bt =
          sweep::boundary_term_scan(cfg.habitat, lam, eps0, 32, cfg.seed + 5);
      normalized[i][0] = um.ratio / um.bound;
      normalized[i][1] = up.ratio / up.bound;
      for (int m = 0; m < 8; ++m)
        normalized[i][2 + m] = bt[m].ratio / bt[m].bound;
    });

    // stability across the three |lambda| decades, per map and per ray
    double worst_spread = 0.0;
    for (int m = 0; m < 10; ++m)
      for (size_t a = 0; a < rays.size(); ++a) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (size_t r = 0; r < radii.size(); ++r) {
          const double v = normalized[a * radii.size() + r][m];
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        worst_spread = std::max(worst_spread, hi / lo);
      }

    std::ostringstream scan_csv;
    scan_csv << "lambda_re,lambda_im,map,ratio_normalized\n";
    static const char* map_names[10] = {
        "abs_kernel_minus", "abs_kernel_plus", "bt1", "bt2", "bt3",
        "bt4",              "bt5",             "bt6", "bt7", "bt8"};
    for (size_t i = 0; i < scan_lambdas.size(); ++i)
      for (int m = 0; m < 10; ++m)
        scan_csv << format_g17(scan_lambdas[i].real()) << ","
                 << format_g17(scan_lambdas[i].imag()) << "," << map_names[m]
                 << "," << format_g17(normalized[i][m]) << "\n";

    CriterionResult c;
    c.key = "sharp_estimate_scans";
    c.runtime_s = sw.seconds();
    c.pass = worst_spread <= 4.0;
    c.detail = describe({{"max_decade_spread_per_map_ray", worst_spread}});
    out.criteria.push_back(c);
    out.extra_files.emplace_back("sweep_scans.csv", scan_csv.str());
  }

  return out;
}

// ---------------------------------------------------------------------------
// evolve suite: criterion 7
// ---------------------------------------------------------------------------

SuiteOutput run_evolve_suite(const RunConfig& cfg) {
  SuiteOutput out;
  out.name = "evolve";
  Stopwatch sw;
  const double eps0 = cfg.sector_spec.epsilon0;
  const HabitatConfig& h = cfg.habitat;

  // initial state: a fixed mix of the three slowest oracle eigenvectors, so
  // both steppers see a resolved, interface-compatible field
  const auto op = direct2d::build_2d_operator(h);
  const auto pairs = direct2d::smallest_eigenpairs(op, 3);
  Eigen::VectorXcd u0_int =
      (pairs.vectors[0] + 0.6 * pairs.vectors[1] + 0.3 * pairs.vectors[2])
          .cast<cd>();
  const GridFunction u0 = op.extend_with_traces(u0_int);

  const sweep::SemigroupEvaluator evaluator(h, cfg.contour, eps0, u0);
  const direct2d::CrankNicolson cn(op, 1e-3);

  const std::vector<double> times = {0.05, 0.1, 0.5};
  std::ostringstream csv;
  csv << "t,rel_err_vs_cn,norm_contour,imag_part\n";
  double worst_cn = 0.0, worst_imag = 0.0;
  std::vector<double> norms;
  for (const double t : times) {
    const GridFunction wc = evaluator.at(t);
    const GridFunction wr = cn.advance(u0, int(std::lround(t / 1e-3)));
    const double rel = grid::norm(wc - wr, h, NormKind::p2) /
                       grid::norm(wr, h, NormKind::p2);
    double imag = 0.0;
    for (Eigen::Index j = 0; j < wc.minus.rows(); ++j)
      imag = std::max(imag, wc.minus.row(j).imag().cwiseAbs().maxCoeff());
    for (Eigen::Index j = 0; j < wc.plus.rows(); ++j)
      imag = std::max(imag, wc.plus.row(j).imag().cwiseAbs().maxCoeff());
    worst_cn = std::max(worst_cn, rel);
    worst_imag = std::max(worst_imag, imag / grid::norm(u0, h, NormKind::p2));
    norms.push_back(grid::norm(wc, h, NormKind::p2));
    csv << format_g17(t) << "," << format_g17(rel) << ","
        << format_g17(norms.back()) << "," << format_g17(imag) << "\n";
  }
  bool norms_decreasing = true;
  for (size_t i = 1; i < norms.size(); ++i)
    norms_decreasing = norms_decreasing && norms[i] < norms[i - 1];

  // semigroup property e^{(t1+t2)S} = e^{t2 S} e^{t1 S}
  const GridFunction half = evaluator.at(0.05);
  const sweep::SemigroupEvaluator second(h, cfg.contour, eps0, half);
  const GridFunction composed = second.at(0.05);
  const GridFunction direct = evaluator.at(0.1);
  const double comp_err = grid::norm(composed - direct, h, NormKind::p2) /
                          grid::norm(direct, h, NormKind::p2);

  // eigenvector decay against the semi-analytic mode oracle on a fine grid
  HabitatConfig fine = h;
  fine.n_transversal = 4;
  fine.n_long_minus = 4097;
  fine.n_long_plus = 4097;
  const auto a_fine = opcore::build_dirichlet_laplacian(fine.n_transversal);
  const int k_mode = fine.n_transversal - 1;  // eigenvalue closest to zero
  const double mu1 = a_fine.eigenvalues[k_mode];
  const auto mode = direct2d::lowest_mode_eigenpair(fine, mu1);
  GridFunction u0e = GridFunction::zero(fine);
  for (int j = 0; j < fine.n_long_minus; ++j)
    for (int i = 0; i < fine.n_transversal; ++i)
      u0e.minus(j, i) = mode.minus[j] * a_fine.eigenvectors(i, k_mode);
  for (int j = 0; j < fine.n_long_plus; ++j)
    for (int i = 0; i < fine.n_transversal; ++i)
      u0e.plus(j, i) = mode.plus[j] * a_fine.eigenvectors(i, k_mode);
  const double t_e = 0.1;
  const GridFunction we =
      sweep::semigroup_apply(fine, cfg.contour, eps0, t_e, u0e);
  const GridFunction expected = cd(std::exp(mode.nu * t_e), 0.0) * u0e;
  const double eig_err = grid::norm(we - expected, fine, NormKind::p2) /
                         grid::norm(expected, fine, NormKind::p2);

  CriterionResult c;
  c.key = "semigroup_evolution";
  c.runtime_s = sw.seconds();
  c.pass = worst_cn <= 1e-4 && comp_err <= 1e-5 && eig_err <= 1e-6 &&
           worst_imag <= 1e-8 && norms_decreasing;
  c.detail = describe({{"max_rel_err_vs_cn", worst_cn},
                       {"composition_err", comp_err},
                       {"eigen_decay_err", eig_err},
                       {"max_imag_fraction", worst_imag},
                       {"mode_nu", mode.nu}});
  out.criteria.push_back(c);
  out.csv = csv.str();
  return out;
}

// ---------------------------------------------------------------------------
// oracle-compare suite: criterion 8
// ---------------------------------------------------------------------------

SuiteOutput run_oracle_compare_suite(const RunConfig& cfg) {
  SuiteOutput out;
  out.name = "oracle-compare";
  Stopwatch sw;
  std::mt19937_64 rng(cfg.seed + 99);
  std::uniform_real_distribution<double> ulen(0.5, 1.5), ud(0.05, 1.5),
      ur(0.01, 1.0), uq(1e-3, 1.0);

  std::ostringstream csv;
  csv << "set,ell,L,d_minus,d_plus,r_minus,r_plus,q,max_real_eig\n";
  double worst = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < 5; ++s) {
    HabitatConfig h;
    h.ell = ulen(rng);
    h.L = ulen(rng);
    h.d_minus = ud(rng);
    h.d_plus = ud(rng);
    h.r_minus = ur(rng);
    h.r_plus = ur(rng);
    h.q = uq(rng);
    h.n_transversal = 6;
    h.n_long_minus = 21;
    h.n_long_plus = 21;
    const auto op = direct2d::build_2d_operator(h);
    const Eigen::VectorXcd eigs = direct2d::spectrum(op);
    const double max_re = eigs.real().maxCoeff();
    worst = std::max(worst, max_re);
    csv << s << "," << format_g17(h.ell) << "," << format_g17(h.L) << ","
        << format_g17(h.d_minus) << "," << format_g17(h.d_plus) << ","
        << format_g17(h.r_minus) << "," << format_g17(h.r_plus) << ","
        << format_g17(h.q) << "," << format_g17(max_re) << "\n";
  }

  CriterionResult c;
  c.key = "spectral_negativity";
  c.runtime_s = sw.seconds();
  c.pass = worst < 0.0;
  c.detail = describe({{"max_real_eig_over_sets", worst}});
  out.criteria.push_back(c);
  out.csv = csv.str();
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

SuiteOutput run_suite(const std::string& name, const RunConfig& cfg) {
  if (name == "propositions") return run_propositions_suite(cfg);
  if (name == "operator") return run_operator_suite(cfg);
  if (name == "resolvent") return run_resolvent_suite(cfg);
  if (name == "sweep") return run_sweep_suite(cfg);
  if (name == "evolve") return run_evolve_suite(cfg);
  if (name == "oracle-compare") return run_oracle_compare_suite(cfg);
  throw std::invalid_argument("run_suite: unknown suite '" + name + "'");
}

std::vector<SuiteOutput> run_selected_suites(const RunConfig& cfg) {
  std::vector<SuiteOutput> outputs;
  for (const std::string& name : kSuiteNames)
    if (std::find(cfg.suites.begin(), cfg.suites.end(), name) !=
        cfg.suites.end())
      outputs.push_back(run_suite(name, cfg));
  return outputs;
}

std::string write_artifacts(const RunConfig& cfg,
                            const std::vector<SuiteOutput>& outputs) {
  std::string dir = cfg.output_dir;
  if (const char* env = std::getenv("SEMIPERM_OUTPUT_DIR")) dir = env;
  std::filesystem::create_directories(dir);

  json summary;
  summary["all_pass"] = all_passed(outputs);
  for (const SuiteOutput& s : outputs) {
    {
      std::ofstream f(dir + "/" + s.name + ".csv");
      f << s.csv;
    }
    for (const auto& [fname, contents] : s.extra_files) {
      std::ofstream f(dir + "/" + fname);
      f << contents;
    }
    for (const CriterionResult& c : s.criteria) {
      summary["criteria"][c.key] = {{"pass", c.pass},
                                    {"suite", s.name},
                                    {"runtime_s", c.runtime_s},
                                    {"limit_s", c.limit_s},
                                    {"detail", c.detail}};
    }
  }
  const std::string text = summary.dump(2) + "\n";
  std::ofstream f(dir + "/summary.json");
  f << text;
  return text;
}

bool all_passed(const std::vector<SuiteOutput>& outputs) {
  for (const SuiteOutput& s : outputs)
    for (const CriterionResult& c : s.criteria)
      if (!c.pass) return false;
  return true;
}

}  // namespace semiperm::bench
