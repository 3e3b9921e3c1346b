/*
 * semiperm — verification driver for the two-habitat transmission operator.
 *
 *   semiperm run --config cfg.json [--suite name]... [--jobs N]
 *       runs the selected suites, writes <suite>.csv and summary.json to the
 *       configured output directory (SEMIPERM_OUTPUT_DIR overrides), prints
 *       one pass/fail line per acceptance criterion, and exits nonzero iff
 *       any criterion fails.
 *
 *   semiperm verify-propositions [--seed N]
 *       runs the complex-plane property suite and prints its CSV.
 *
 *   semiperm print-default-config
 *       prints the default configuration JSON (the one the acceptance suite
 *       uses).
 */

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "semiperm/suites.hpp"

using namespace semiperm;

int main(int argc, char** argv) {
  CLI::App app{"two-habitat transmission operator verification"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> suite_flags;
  int jobs = 0;
  auto* run = app.add_subcommand("run", "run verification suites");
  run->add_option("--config", config_path, "config JSON path")->required();
  run->add_option("--suite", suite_flags, "suite name (repeatable)");
  run->add_option("--jobs", jobs, "worker threads for the lambda maps");

  uint64_t vp_seed = 12345;
  auto* vp = app.add_subcommand("verify-propositions",
                                "run the complex-plane property suite");
  vp->add_option("--seed", vp_seed, "RNG seed");

  app.add_subcommand("print-default-config", "print the default config JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("print-default-config")) {
      std::cout << bench::config_to_json(bench::default_config()) << "\n";
      return 0;
    }

    if (app.got_subcommand("verify-propositions")) {
      bench::RunConfig cfg = bench::default_config();
      cfg.seed = vp_seed;
      cfg.suites = {"propositions"};
      const auto out = bench::run_suite("propositions", cfg);
      std::cout << out.csv;
      return bench::all_passed({out}) ? 0 : 1;
    }

    bench::RunConfig cfg = bench::load_config(config_path);
    if (!suite_flags.empty()) {
      cfg.suites = suite_flags;
      cfg.validate();
    }
    if (jobs > 0) cfg.jobs = jobs;

    const auto adm = bench::check_sector_admissibility(cfg);
    if (!adm.admissible) {
      std::fprintf(stderr,
                   "configuration error: epsilon0 = %.6g exceeds the "
                   "admissible bound atan(pi^2/(2R) min(1/L^2, 1/ell^2)) = "
                   "%.6g (empirical R = %.6g)\n",
                   cfg.sector_spec.epsilon0, adm.epsilon0_bound,
                   adm.empirical_R);
      return 2;
    }
    if (adm.degenerate)
      std::fprintf(stderr,
                   "warning: admissible epsilon0 bound %.6g is below 1e-3 "
                   "rad; sector margins are degenerate for this geometry\n",
                   adm.epsilon0_bound);
    cfg.sector_spec.big_R = adm.empirical_R;

    const auto outputs = bench::run_selected_suites(cfg);
    bench::write_artifacts(cfg, outputs);
    for (const auto& s : outputs)
      for (const auto& c : s.criteria)
        std::printf("[%s] %-32s %s  (%.2fs)  %s\n", s.name.c_str(),
                    c.key.c_str(), c.pass ? "PASS" : "FAIL", c.runtime_s,
                    c.detail.c_str());
    return bench::all_passed(outputs) ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
