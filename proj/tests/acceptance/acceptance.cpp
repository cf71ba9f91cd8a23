// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any fails.
// An optional argument overrides the number of seeds of the figure-ordering run.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

#include "criteria.hpp"
#include "offload/config.hpp"
#include "offload/experiments.hpp"

namespace {

criteria::Verdict figure_orderings(int repetitions) {
  using namespace offload;
  criteria::Stopwatch clock;
  const RunConfig rc = load_run_config(OFFLOAD_SOURCE_DIR "/configs/desk.yaml");
  FigureSuiteSpec spec;
  spec.base.scenario = rc.scenario;
  spec.base.solver = rc.solver;
  spec.base.solver.keep_trace = false;
  spec.base.saturation_ratio = rc.saturation_ratio;
  spec.base.first_seed = rc.scenario.model.rng_seed;
  spec.base.repetitions = repetitions;
  const FigureSuite suite = run_figure_suite(spec);
  const double secs = clock.seconds();

  int failed = 0, missed = 0, passed = 0;
  std::string failures;
  for (const auto& c : suite.checks) {
    if (c.passed) ++passed;
    else if (c.soft) ++missed;
    else {
      ++failed;
      failures += "\n    failed: " + c.name + " :: " + c.detail;
    }
  }
  std::ostringstream report;
  write_ordering_report(report, suite.checks);
  std::cerr << report.str();

  criteria::Verdict v;
  v.pass = failed == 0 && secs < 15 * 60;
  v.detail = criteria::fmt("%.0f cells x %.0f users, %.0f seeds: ", rc.scenario.model.num_cells,
                           rc.scenario.model.users_per_cell, repetitions) +
             criteria::fmt("%.0f checks passed, %.0f orderings failed, %.0f soft bands missed; %.0f s", passed, failed,
                           missed, secs) +
             failures;
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const int repetitions = argc > 1 ? std::atoi(argv[1]) : 10;
  criteria::Verdict v[9];
  try {
    v[1] = criteria::analytic_exactness();
    v[2] = criteria::derivative_correctness();
    v[3] = criteria::unimodality();
    v[4] = criteria::kappa_monotonicity();
    v[5] = criteria::simulation_agreement();
    v[6] = criteria::best_response_oracles();
    v[8] = criteria::structural_identities();
    v[7] = figure_orderings(repetitions);
  } catch (const std::exception& e) {
    std::cout << "error: " << e.what() << '\n';
    return 2;
  }
  static const char* names[] = {"",
                                "analytic exactness",
                                "derivative correctness",
                                "unimodality",
                                "monotonicity in offloading ratios",
                                "analytic vs simulation agreement",
                                "best-response oracles",
                                "figure orderings at desk scale",
                                "structural identities"};
  bool all = true;
  for (int i = 1; i <= 8; ++i) {
    std::cout << "CRITERION " << i << ": " << (v[i].pass ? "PASS" : "FAIL") << " (" << names[i] << ") "
              << v[i].detail << std::endl;
    all = all && v[i].pass;
  }
  return all ? 0 : 1;
}
