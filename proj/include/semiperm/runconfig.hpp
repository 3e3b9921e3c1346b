/*
 * runconfig.hpp — experiment configuration: physical constants, sector and
 * contour parameters, seed, output directory, and the suite selection.  All
 * physical constants are explicit in the JSON config; there are no hidden
 * defaults for ell, L, d±, r±, q.
 */

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "semiperm/complex_geometry.hpp"
#include "semiperm/grid.hpp"
#include "semiperm/sweep.hpp"

namespace semiperm::bench {

inline const std::vector<std::string> kSuiteNames = {
    "propositions", "operator", "resolvent", "sweep", "evolve",
    "oracle-compare"};

struct RunConfig {
  grid::HabitatConfig habitat;
  sector::SectorSpec sector_spec;
  sweep::ContourSpec contour;
  uint64_t seed = 12345;
  std::string output_dir = "out";
  std::vector<std::string> suites = kSuiteNames;
  int jobs = 2;

  void validate() const;  // field-level errors
};

// The configuration the acceptance suite runs on.
RunConfig default_config();

// Parse and validate; throws std::invalid_argument with a field-level
// message ("config: habitat.q must be > 0").
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& cfg);

struct AdmissibilityReport {
  double empirical_R;
  double epsilon0_bound;  // atan(pi^2/(2R) min(1/L^2, 1/ell^2))
  bool admissible;        // epsilon0 <= bound
  bool degenerate;        // bound < 1e-3 rad
};

// Empirical-R scan for the configured sector; inadmissible epsilon0 is a
// configuration error for the CLI.
AdmissibilityReport check_sector_admissibility(const RunConfig& cfg);

}  // namespace semiperm::bench
