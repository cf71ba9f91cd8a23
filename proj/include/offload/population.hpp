#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "offload/mobility.hpp"
#include "offload/scenario.hpp"

namespace offload {

enum class WillingnessMode { heterogeneous, homogeneous };

/// Everything needed to synthesize one population.
struct ScenarioSpec {
  ModelConfig model;
  DemandDistribution demand = DemandDistribution::with_mean(0.57, 43.3);
  DiurnalConfig diurnal;
  /// Negative means "scale 12 of 31 cells to num_cells".
  int office_cells = -1;
  double popularity_spread = 0.5;
  double visited_bs_mean = 2.4;
  int visited_bs_max = 6;
  /// Overrides the geometric law when non-empty.
  std::map<int, double> visited_bs_distribution;
  ContactModel contact;
  /// Fraction of users in each named delay scenario.
  std::map<std::string, double> delay_portions = {{"zero", 1.0}};
  ClassMix class_mix;
  WillingnessMode willingness = WillingnessMode::heterogeneous;
  double disutility_factor = 0.0;
  bool stratified_demand = false;

  int resolved_office_cells() const;
  void validate() const;
};

struct Population {
  ModelConfig config;
  std::vector<int> deadline_grid = default_deadline_grid();
  std::vector<UserProfile> users;
  Eigen::MatrixXd cell_attraction;
  ContactDiagnostics contact_diagnostics;
  /// Index into the scenario names of `delay_portions` for each user.
  std::vector<std::string> delay_scenario;

  double total_weight() const;
};

Population build_population(const ScenarioSpec& spec);

/// Reassigns delay profiles in place: the first portion of users (by index) gets the
/// first scenario, and so on. Users are exchangeable, so this keeps draws paired.
void assign_delay_portions(Population& pop, const std::map<std::string, double>& portions,
                           const ClassMix& mix);

void set_disutility(Population& pop, double factor);

/// Multiplies every user's daily demand; demand draws stay paired across factors.
void scale_demand(Population& pop, double factor);

/// Identical users apart from demand: one cell, homogeneous contacts, no deferral,
/// willingness w(t)^(1-theta), and a temporal profile whose peak share equals
/// kappa_peak / kappa_avg. With `quadrature` the demands are CDF midpoints each
/// carrying weight n_hat / n; otherwise n_hat stratified random draws of weight 1.
struct HomogeneousMarketSpec {
  double n_hat = 1e4;
  DemandDistribution demand{0.5, 1.0};
  double theta = 0.5;
  double eta = 0.1;
  double capacity = 1e9;
  double kappa_avg = 0.5;
  double kappa_peak = 0.05;
  int num_slots = 24;
  std::uint64_t seed = 1;
  bool quadrature = false;
  int quadrature_nodes = 100000;
};

Population build_homogeneous_population(const HomogeneousMarketSpec& spec);

}  // namespace offload
