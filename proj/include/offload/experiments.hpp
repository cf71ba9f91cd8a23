#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "offload/equilibrium.hpp"
#include "offload/population.hpp"

namespace offload {

enum class SweepAxis { delay_scenario, demand_mean, capacity, scheme, mix, disutility };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// What one sweep point changes relative to the base scenario.
struct PointOverride {
  std::optional<std::map<std::string, double>> delay_portions;
  std::optional<double> demand_mean;       // MB per day
  std::optional<double> capacity_factor;   // multiplies the calibrated capacity
  std::optional<double> disutility;
  std::optional<std::vector<SchemeFamily>> schemes;
};

/// Parses "zero:0.5,long:0.5" style portions.
std::map<std::string, double> parse_portions(std::string_view text);

struct SweepSpec {
  SweepAxis axis = SweepAxis::delay_scenario;
  std::vector<std::string> values;
  /// Value (one of `values`) that gains are measured against.
  std::string baseline;
  int repetitions = 10;
  std::uint64_t first_seed = 1;
  std::vector<SchemeFamily> schemes = {SchemeFamily::flat, SchemeFamily::volume};
  ScenarioSpec scenario;
  /// When positive, each seed's capacity is the zero-delay full-subscription peak
  /// cell load divided by this ratio; otherwise scenario.model.capacity_per_cell.
  double saturation_ratio = 0.0;
  SolverOptions solver;

  void validate() const;
  PointOverride override_for(const std::string& value) const;
};

/// Mean and sample standard deviation over seeds.
struct Spread {
  double mean = 0.0;
  double sd = 0.0;
};

Spread spread_of(const std::vector<double>& v);

/// Equilibrium metrics kept per seed.
struct SeedMetrics {
  std::uint64_t seed = 0;
  Saturation saturation = Saturation::infeasible;
  std::vector<double> price;  // scheme parameters (fee, unit price, ...)
  double revenue = 0.0, surplus = 0.0, welfare = 0.0;
  double subscription_ratio = 0.0, payment_per_unit_traffic = 0.0;
  double kappa_avg = 0.0, kappa_peak = 0.0, kappa_peak_cell = 0.0;
  double peak_load_ratio = 0.0, adoption_fraction = 0.0;
  double capacity = 0.0;
  bool multimodal = false;
  Eigen::VectorXd load_variance;  // per slot, empty with one cell
  Eigen::VectorXd traffic;        // generated traffic per slot
};

struct PointSummary {
  std::string value;
  SchemeFamily scheme = SchemeFamily::flat;
  std::vector<SeedMetrics> seeds;
  Spread revenue, surplus, welfare, subscription_ratio, payment_per_unit_traffic;
  Spread kappa_avg, kappa_peak, kappa_peak_cell, peak_load_ratio, adoption_fraction;
  std::vector<Spread> price;
  Eigen::VectorXd load_variance;  // seed mean
  Eigen::VectorXd traffic;        // seed mean
  int saturated = 0;
  int infeasible = 0;
  /// (mean revenue - baseline mean revenue) / baseline mean revenue, same scheme.
  std::optional<double> relative_gain;
};

struct ComparisonReport {
  std::string name;
  SweepAxis axis = SweepAxis::delay_scenario;
  std::string baseline;
  std::vector<PointSummary> points;
  /// "value/scheme/seed" of every infeasible solve.
  std::vector<std::string> infeasible;

  const PointSummary& at(const std::string& value, SchemeFamily scheme) const;
  const PointSummary* find(const std::string& value, SchemeFamily scheme) const;
};

/// Zero-delay, full-subscription peak per-cell load of a population.
double reference_peak_load(const Population& pop);

ComparisonReport run_scenario_sweep(const SweepSpec& spec);
/// Points "3g:zero", "3g:long", "4g:zero", "4g:long"; baseline "3g:zero".
ComparisonReport run_capacity_comparison(const SweepSpec& base, double upgrade_factor = 4.0);
/// Flat fee, subscription ratio and payment per unit traffic per delay scenario.
ComparisonReport run_price_dynamics(const SweepSpec& base);
/// Zero and long scenarios under all four schemes.
ComparisonReport run_granularity_comparison(const SweepSpec& base);
/// Volume pricing; values "short@0.1" etc. Baseline "zero@0".
ComparisonReport run_disutility_sweep(const SweepSpec& base, const std::vector<std::string>& profiles,
                                      const std::vector<double>& factors);

/// Points zero/short/medium/long plus "4g:zero" at demand_mean; baseline "zero".
ComparisonReport run_low_demand_comparison(const SweepSpec& base, double demand_mean, double upgrade_factor = 4.0);

/// Gain of `scheme` over `reference` at one point: seed-mean revenue ratio minus 1.
double scheme_gain(const ComparisonReport& report, const std::string& value, SchemeFamily scheme,
                   SchemeFamily reference);

/// One row per (value, scheme): seed means, spreads and gains.
void write_report_csv(std::ostream& os, const ComparisonReport& report);
/// One row per (value, scheme, seed).
void write_seed_csv(std::ostream& os, const ComparisonReport& report);
/// One row per (value, scheme, slot) of mean normalized cell-load variance.
void write_variance_csv(std::ostream& os, const ComparisonReport& report);

struct OrderingCheck {
  std::string name;
  bool passed = false;
  /// Soft targets are reported but never fail a run.
  bool soft = false;
  std::string detail;
};

struct FigureSuite {
  ComparisonReport scenarios;
  ComparisonReport mix;
  ComparisonReport capacity;
  ComparisonReport granularity;
  ComparisonReport disutility;
  /// Delay scenarios and the 4G upgrade at a demand low enough to leave capacity idle.
  ComparisonReport low_demand;
  std::vector<OrderingCheck> checks;
};

struct FigureSuiteSpec {
  SweepSpec base;
  std::vector<double> disutility_factors = {0.0, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5};
  /// Each value moves some users to a longer deadline than the previous one.
  std::vector<std::string> mix_values = {"zero:1", "zero:0.5,short:0.5", "zero:0.25,short:0.25,medium:0.25,long:0.25",
                                         "medium:0.5,long:0.5", "long:1"};
  /// Demand of the low-demand report as a multiple of the base mean.
  double low_demand_factor = 0.1;
};

FigureSuite run_figure_suite(const FigureSuiteSpec& spec);
std::vector<OrderingCheck> evaluate_orderings(const FigureSuite& suite);
void write_ordering_report(std::ostream& os, const std::vector<OrderingCheck>& checks);

}  // namespace offload
