/*
 * suites.hpp — the verification suites behind the CLI and the acceptance
 * run.  Each suite produces one CSV artifact and the pass/fail results of
 * the acceptance criteria it owns:
 *
 *   propositions   -> property_suite, symbol_floor
 *   operator       -> determinant_inverse_norm
 *   resolvent      -> resolvent_oracle_convergence
 *   sweep          -> generation_sector_estimate, sharp_estimate_scans
 *   evolve         -> semigroup_evolution
 *   oracle-compare -> spectral_negativity
 *
 * Criteria carry their runtime limits; exceeding a limit fails the
 * criterion.  All randomness is seeded from the RunConfig, and parallel
 * lambda maps reduce in index order, so outputs are reproducible.
 */

#pragma once

#include <string>
#include <vector>

#include "semiperm/runconfig.hpp"

namespace semiperm::bench {

struct CriterionResult {
  std::string key;
  bool pass = false;
  double runtime_s = 0.0;
  double limit_s = 0.0;  // 0 = unlimited
  std::string detail;    // one-line summary with the measured numbers
};

struct SuiteOutput {
  std::string name;
  std::vector<CriterionResult> criteria;
  std::string csv;  // contents of <suite>.csv
  // additional artifacts (filename, contents), e.g. the scan table the sweep
  // suite writes besides its fixed 40-row sweep.csv
  std::vector<std::pair<std::string, std::string>> extra_files;
};

SuiteOutput run_suite(const std::string& name, const RunConfig& cfg);

// All suites named in cfg.suites, in canonical order.
std::vector<SuiteOutput> run_selected_suites(const RunConfig& cfg);

// Write <suite>.csv files and summary.json under cfg.output_dir (or the
// SEMIPERM_OUTPUT_DIR environment override); returns the summary JSON text.
std::string write_artifacts(const RunConfig& cfg,
                            const std::vector<SuiteOutput>& outputs);

bool all_passed(const std::vector<SuiteOutput>& outputs);

// 17-significant-digit float formatting used for every CSV field.
std::string format_g17(double v);

}  // namespace semiperm::bench
