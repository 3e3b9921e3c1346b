#include "semiperm/runconfig.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace semiperm::bench {

using cd = std::complex<double>;
using nlohmann::json;

void RunConfig::validate() const {
  try {
    habitat.validate();
    sector_spec.validate();
    contour.validate(sector_spec.epsilon0);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (jobs < 1) throw std::invalid_argument("config: jobs must be >= 1");
  for (const auto& s : suites)
    if (std::find(kSuiteNames.begin(), kSuiteNames.end(), s) ==
        kSuiteNames.end())
      throw std::invalid_argument("config: unknown suite '" + s + "'");
}

RunConfig default_config() {
  RunConfig cfg;
  cfg.habitat.ell = 0.9;
  cfg.habitat.L = 1.1;
  cfg.habitat.d_minus = 0.10;
  cfg.habitat.d_plus = 0.12;
  cfg.habitat.r_minus = 0.04;
  cfg.habitat.r_plus = 0.06;
  cfg.habitat.q = 0.01;
  cfg.habitat.n_transversal = 16;
  cfg.habitat.n_long_minus = 513;
  cfg.habitat.n_long_plus = 513;
  cfg.sector_spec.epsilon0 = 0.40;
  cfg.sector_spec.radius_min = 1e-3;
  cfg.sector_spec.radius_max = 1e6;
  cfg.sector_spec.n_radial = 100;
  cfg.sector_spec.n_angular = 100;
  cfg.sector_spec.big_R = 12.0;  // overwritten by the empirical scan
  cfg.contour.mu = 10.0;
  cfg.contour.beta = 1.05;
  cfg.contour.n_nodes = 64;
  cfg.contour.t_min = 0.05;
  cfg.contour.t_max = 0.5;
  cfg.seed = 12345;
  cfg.output_dir = "out";
  cfg.jobs = 2;
  return cfg;
}

namespace {

double need_number(const json& j, const std::string& where,
                   const std::string& key) {
  if (!j.contains(key) || !j[key].is_number())
    throw std::invalid_argument("config: missing numeric field " + where + "." +
                                key);
  return j[key].get<double>();
}

int need_int(const json& j, const std::string& where, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw std::invalid_argument("config: missing integer field " + where + "." +
                                key);
  return j[key].get<int>();
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") +
                                e.what());
  }

  RunConfig cfg = default_config();
  if (!j.contains("habitat"))
    throw std::invalid_argument("config: missing section habitat");
  const json& h = j["habitat"];
  cfg.habitat.ell = need_number(h, "habitat", "ell");
  cfg.habitat.L = need_number(h, "habitat", "L");
  cfg.habitat.d_minus = need_number(h, "habitat", "d_minus");
  cfg.habitat.d_plus = need_number(h, "habitat", "d_plus");
  cfg.habitat.r_minus = need_number(h, "habitat", "r_minus");
  cfg.habitat.r_plus = need_number(h, "habitat", "r_plus");
  cfg.habitat.q = need_number(h, "habitat", "q");
  cfg.habitat.n_transversal = need_int(h, "habitat", "n_transversal");
  cfg.habitat.n_long_minus = need_int(h, "habitat", "n_long_minus");
  cfg.habitat.n_long_plus = need_int(h, "habitat", "n_long_plus");

  if (j.contains("sector")) {
    const json& s = j["sector"];
    cfg.sector_spec.epsilon0 = need_number(s, "sector", "epsilon0");
    cfg.sector_spec.radius_min = need_number(s, "sector", "radius_min");
    cfg.sector_spec.radius_max = need_number(s, "sector", "radius_max");
    cfg.sector_spec.n_radial = need_int(s, "sector", "n_radial");
    cfg.sector_spec.n_angular = need_int(s, "sector", "n_angular");
    if (s.contains("big_R")) cfg.sector_spec.big_R = s["big_R"].get<double>();
  }
  if (j.contains("contour")) {
    const json& c = j["contour"];
    if (c.contains("shape") && c["shape"].get<std::string>() != "hyperbola")
      throw std::invalid_argument("config: contour.shape must be 'hyperbola'");
    cfg.contour.mu = need_number(c, "contour", "mu");
    cfg.contour.beta = need_number(c, "contour", "beta");
    cfg.contour.n_nodes = need_int(c, "contour", "n_nodes");
    cfg.contour.t_min = need_number(c, "contour", "t_min");
    cfg.contour.t_max = need_number(c, "contour", "t_max");
  }
  if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
  if (j.contains("output_dir"))
    cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("suites"))
    cfg.suites = j["suites"].get<std::vector<std::string>>();
  if (j.contains("jobs")) cfg.jobs = j["jobs"].get<int>();

  cfg.validate();
  return cfg;
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["habitat"] = {{"ell", cfg.habitat.ell},
                  {"L", cfg.habitat.L},
                  {"d_minus", cfg.habitat.d_minus},
                  {"d_plus", cfg.habitat.d_plus},
                  {"r_minus", cfg.habitat.r_minus},
                  {"r_plus", cfg.habitat.r_plus},
                  {"q", cfg.habitat.q},
                  {"n_transversal", cfg.habitat.n_transversal},
                  {"n_long_minus", cfg.habitat.n_long_minus},
                  {"n_long_plus", cfg.habitat.n_long_plus}};
  j["sector"] = {{"epsilon0", cfg.sector_spec.epsilon0},
                 {"radius_min", cfg.sector_spec.radius_min},
                 {"radius_max", cfg.sector_spec.radius_max},
                 {"n_radial", cfg.sector_spec.n_radial},
                 {"n_angular", cfg.sector_spec.n_angular},
                 {"big_R", cfg.sector_spec.big_R}};
  j["contour"] = {{"shape", "hyperbola"},
                  {"mu", cfg.contour.mu},
                  {"beta", cfg.contour.beta},
                  {"n_nodes", cfg.contour.n_nodes},
                  {"t_min", cfg.contour.t_min},
                  {"t_max", cfg.contour.t_max}};
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["suites"] = cfg.suites;
  j["jobs"] = cfg.jobs;
  return j.dump(2);
}

AdmissibilityReport check_sector_admissibility(const RunConfig& cfg) {
  sector::SymbolParams base;
  base.ell = cfg.habitat.ell;
  base.L = cfg.habitat.L;
  base.d_minus = cfg.habitat.d_minus;
  base.d_plus = cfg.habitat.d_plus;
  base.r_minus = cfg.habitat.r_minus;
  base.r_plus = cfg.habitat.r_plus;
  base.q = cfg.habitat.q;
  base.lambda = cd(0.0, 0.0);
  const double eps0 = cfg.sector_spec.epsilon0;
  const std::vector<cd> lambdas =
      sector::sector_lambda_grid(eps0, 7, 9, 1e-2, 1e6);
  AdmissibilityReport rep;
  rep.empirical_R = sector::empirical_big_R(eps0, base, lambdas);
  rep.epsilon0_bound =
      sector::admissible_epsilon0(rep.empirical_R, cfg.habitat.ell, cfg.habitat.L);
  rep.admissible = eps0 <= rep.epsilon0_bound;
  rep.degenerate = rep.epsilon0_bound < 1e-3;
  return rep;
}

}  // namespace semiperm::bench
