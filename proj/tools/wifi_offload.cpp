// Command-line front end: solve one scenario, run sweeps, check invariants,
// and export the data behind the comparison figures.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "offload/config.hpp"
#include "offload/equilibrium.hpp"
#include "offload/errors.hpp"
#include "offload/experiments.hpp"
#include "offload/market.hpp"
#include "offload/tabular.hpp"

namespace fs = std::filesystem;
using namespace offload;

namespace {

struct Common {
  std::string config;
  std::string scale;
  std::string out = "out";
  std::int64_t seed = -1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config, "YAML scenario file")->check(CLI::ExistingFile);
  app->add_option("--scale", c.scale, "Population preset: full (31x1000) or desk (8x200)")
      ->check(CLI::IsMember({"full", "desk"}));
  app->add_option("-o,--out", c.out, "Output directory");
  app->add_option("--seed", c.seed, "RNG seed (first seed for sweeps)")->check(CLI::NonNegativeNumber);
}

RunConfig load(const Common& c) {
  RunConfig rc = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (!c.scale.empty()) {
    apply_scale_preset(rc.scenario, c.scale);
    if (rc.sweep) apply_scale_preset(rc.sweep->scenario, c.scale);
  }
  if (c.seed >= 0) {
    rc.scenario.model.rng_seed = static_cast<std::uint64_t>(c.seed);
    if (rc.sweep) rc.sweep->first_seed = static_cast<std::uint64_t>(c.seed);
  }
  return rc;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream os(dir / name);
  if (!os) throw ConfigError("cannot write " + (dir / name).string());
  return os;
}

void print_outcome(const std::string& label, const MarketOutcome& o, const std::string& extra) {
  std::cout << label << ": revenue " << format_number(o.revenue) << ", surplus " << format_number(o.surplus)
            << ", welfare " << format_number(o.welfare) << ", kappa_avg " << format_number(o.kappa_avg)
            << ", kappa_peak " << format_number(o.kappa_peak) << ", peak/capacity "
            << format_number(o.capacity > 0 ? o.peak_cell_load / o.capacity : 0.0) << extra << '\n';
}

int cmd_solve(const Common& c, const std::vector<std::string>& scheme_names, const std::string& import_paths,
              const std::string& import_contacts, bool export_population) {
  RunConfig rc = load(c);
  Population pop = build_population(rc.scenario);
  if (!import_paths.empty()) {
    std::ifstream in(import_paths);
    if (!in) throw ConfigError("cannot open " + import_paths);
    read_cell_paths(in, pop);
  }
  if (!import_contacts.empty()) {
    std::ifstream in(import_contacts);
    if (!in) throw ConfigError("cannot open " + import_contacts);
    read_contacts(in, pop);
  }
  if (rc.saturation_ratio > 0.0) pop.config.capacity_per_cell = reference_peak_load(pop) / rc.saturation_ratio;
  const fs::path out = c.out;
  if (export_population) {
    auto p = open_out(out, "cell_paths.csv");
    write_cell_paths(p, pop);
    auto e = open_out(out, "contacts.csv");
    write_contacts(e, pop);
  }
  const Market market(pop);
  std::cout << "users " << pop.users.size() << ", cells " << pop.config.num_cells << ", capacity/cell "
            << format_number(market.capacity()) << '\n';

  if (rc.pricing && scheme_names.empty()) {
    const MarketOutcome o = market.evaluate(*rc.pricing);
    const std::string name(to_string(family_of(*rc.pricing)));
    auto os = open_out(out, "outcome_" + name + ".csv");
    write_outcome_csv(os, o);
    auto ss = open_out(out, "summary_" + name + ".csv");
    write_summary_csv(ss, o, name);
    print_outcome(describe(*rc.pricing), o, o.feasible ? "" : " (infeasible)");
    return 0;
  }
  std::vector<SchemeFamily> families = rc.schemes;
  if (!scheme_names.empty()) {
    families.clear();
    for (const auto& s : scheme_names) families.push_back(parse_scheme_family(s));
  }
  for (SchemeFamily f : families) {
    const auto t0 = std::chrono::steady_clock::now();
    const EquilibriumResult r = solve_numeric(market, f, rc.solver);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string name(to_string(f));
    auto os = open_out(out, "outcome_" + name + ".csv");
    write_outcome_csv(os, r.outcome);
    auto ss = open_out(out, "summary_" + name + ".csv");
    write_summary_csv(ss, r.outcome, name);
    if (f == SchemeFamily::congestion) {
      auto ms = open_out(out, "congestion_matrix.csv");
      write_congestion_matrix(ms, std::get<CongestionPricing>(r.scheme).unit_price);
    }
    std::ostringstream extra;
    extra << ", " << to_string(r.saturation) << ", " << std::fixed << std::setprecision(2) << secs << " s";
    if (r.multimodal) extra << ", multimodal";
    print_outcome(describe(r.scheme), r.outcome, extra.str());
  }
  return 0;
}

void write_report(const fs::path& dir, const std::string& stem, const ComparisonReport& r) {
  auto a = open_out(dir, stem + ".csv");
  write_report_csv(a, r);
  auto b = open_out(dir, stem + "_seeds.csv");
  write_seed_csv(b, r);
  for (const auto& p : r.points) {
    if (p.load_variance.size() > 0) {
      auto v = open_out(dir, stem + "_variance.csv");
      write_variance_csv(v, r);
      break;
    }
  }
  for (const auto& s : r.infeasible) std::cerr << "infeasible point: " << s << '\n';
}

void print_report(const ComparisonReport& r) {
  for (const auto& p : r.points) {
    std::cout << "  " << p.value << " / " << to_string(p.scheme) << ": revenue " << format_number(p.revenue.mean)
              << " +- " << format_number(p.revenue.sd);
    if (p.relative_gain) std::cout << ", gain " << format_number(100.0 * *p.relative_gain) << "%";
    std::cout << '\n';
  }
}

int cmd_sweep(const Common& c, int repetitions) {
  RunConfig rc = load(c);
  if (!rc.sweep) throw ConfigError("the config has no sweep section");
  if (repetitions > 0) rc.sweep->repetitions = repetitions;
  const ComparisonReport r = run_scenario_sweep(*rc.sweep);
  write_report(c.out, std::string(to_string(r.axis)), r);
  print_report(r);
  return 0;
}

int cmd_export(const Common& c, int repetitions) {
  RunConfig rc = load(c);
  FigureSuiteSpec spec;
  spec.base.scenario = rc.scenario;
  spec.base.solver = rc.solver;
  spec.base.solver.keep_trace = false;
  spec.base.saturation_ratio = rc.saturation_ratio;
  spec.base.first_seed = rc.scenario.model.rng_seed;
  if (rc.sweep) spec.base.repetitions = rc.sweep->repetitions;
  if (repetitions > 0) spec.base.repetitions = repetitions;
  const auto t0 = std::chrono::steady_clock::now();
  const FigureSuite s = run_figure_suite(spec);
  const fs::path out = c.out;
  write_report(out, "delay_scenario", s.scenarios);
  write_report(out, "mix", s.mix);
  write_report(out, "capacity", s.capacity);
  write_report(out, "scheme", s.granularity);
  write_report(out, "disutility", s.disutility);
  write_report(out, "demand_mean", s.low_demand);
  auto rep = open_out(out, "orderings.txt");
  write_ordering_report(rep, s.checks);
  write_ordering_report(std::cout, s.checks);
  std::cout << "elapsed " << format_number(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count())
            << " s, data in " << out.string() << '\n';
  int fails = 0;
  for (const auto& ch : s.checks) fails += !ch.passed && !ch.soft;
  return fails == 0 ? 0 : 1;
}

// Structural identities on random price vectors for the configured population.
int cmd_validate(const Common& c, int trials) {
  RunConfig rc = load(c);
  Population pop = build_population(rc.scenario);
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) {
      ++failures;
      std::cout << "FAIL " << what << '\n';
    }
  };
  for (std::size_t i = 0; i < pop.users.size(); ++i) {
    for (const auto& v : validate_profile(pop.users[i], pop.config, pop.deadline_grid))
      check(false, "user " + std::to_string(i) + ": " + v);
  }
  if (rc.saturation_ratio > 0.0) pop.config.capacity_per_cell = reference_peak_load(pop) / rc.saturation_ratio;
  const Market market(pop);
  std::mt19937_64 rng(pop.config.rng_seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double phi_max = rc.scenario.demand.phi_max;
  const int T = pop.config.num_slots, S = pop.config.num_cells;
  for (int k = 0; k < trials; ++k) {
    const double p = 0.5 * u(rng);
    const double fee = phi_max * 0.2 * u(rng);
    const std::vector<PricingScheme> schemes = {
        FlatPricing{fee}, TwoTierPricing{fee, fee * (1.0 + u(rng)), phi_max * u(rng)}, VolumePricing{p},
        CongestionPricing{Eigen::MatrixXd::Constant(T, S, p)},
        CongestionPricing{p * (Eigen::MatrixXd::Random(T, S).array() + 1.0).matrix()}};
    for (const auto& s : schemes) {
      const MarketOutcome o = market.evaluate(s);
      const std::string tag = describe(s);
      check(o.kappa_peak <= o.kappa_avg + 1e-12 && o.kappa_avg <= 1.0 + 1e-12, tag + ": kappa_peak <= kappa_avg <= 1");
      check(std::abs(o.welfare - (o.surplus + o.revenue)) <= 1e-6 * std::max(1.0, std::abs(o.welfare)),
            tag + ": W = S + R");
    }
    const MarketOutcome v = market.evaluate(schemes[2]), cg = market.evaluate(schemes[3]);
    check(v.revenue == cg.revenue && v.surplus == cg.surplus && v.cell_load == cg.cell_load &&
              v.total_x == cg.total_x && v.total_y == cg.total_y,
          "congestion(constant) == volume at p=" + format_number(p));
  }
  std::cout << (failures == 0 ? "PASS" : "FAIL") << " validate: " << trials << " random price sets, "
            << pop.users.size() << " users, " << failures << " violations\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Delayed WiFi offloading pricing simulator"};
  app.require_subcommand(1);

  Common solve_opts, sweep_opts, validate_opts, export_opts;
  std::vector<std::string> schemes;
  std::string import_paths, import_contacts;
  bool export_population = false;
  int sweep_reps = 0, export_reps = 0, trials = 20;

  auto* solve = app.add_subcommand("solve", "Solve the provider equilibrium for one scenario");
  add_common(solve, solve_opts);
  solve->add_option("-s,--scheme", schemes, "Pricing schemes to optimize (flat, two-tier, volume, congestion)");
  solve->add_option("--import-paths", import_paths, "Replace cell paths from a user,slot,value table")
      ->check(CLI::ExistingFile);
  solve->add_option("--import-contacts", import_contacts,
                    "Replace contact probabilities from a user,deadline_minutes,slot,value table")
      ->check(CLI::ExistingFile);
  solve->add_flag("--export-population", export_population, "Write cell_paths.csv and contacts.csv");

  auto* sweep = app.add_subcommand("sweep", "Run the sweep described in the config's sweep section");
  add_common(sweep, sweep_opts);
  sweep->add_option("-r,--repetitions", sweep_reps, "Override the number of seeds")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Check structural identities on random prices");
  add_common(validate, validate_opts);
  validate->add_option("--trials", trials, "Random price sets")->check(CLI::PositiveNumber);

  auto* exp = app.add_subcommand("export-figure-data", "Run every comparison and write CSV plus ordering report");
  add_common(exp, export_opts);
  exp->add_option("-r,--repetitions", export_reps, "Seeds per point")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*solve) return cmd_solve(solve_opts, schemes, import_paths, import_contacts, export_population);
    if (*sweep) return cmd_sweep(sweep_opts, sweep_reps);
    if (*validate) return cmd_validate(validate_opts, trials);
    if (*exp) return cmd_export(export_opts, export_reps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
