#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "offload/analytic.hpp"
#include "offload/market.hpp"
#include "offload/population.hpp"
#include "offload/pricing.hpp"
#include "offload/user_response.hpp"

namespace offload {

enum class Saturation { opt_saturated, opt_unsaturated, infeasible };

std::string_view to_string(Saturation s);

struct TracePoint {
  std::vector<double> params;
  double revenue = 0.0;
  bool feasible = false;
};

struct EquilibriumResult {
  PricingScheme scheme = FlatPricing{};
  MarketOutcome outcome;
  Saturation saturation = Saturation::infeasible;
  /// Infimum of the feasible price set (flat fee / unit price; scheme-specific otherwise).
  double threshold_price = 0.0;
  std::vector<TracePoint> trace;
  /// The coarse grid found a better point than the local search.
  bool multimodal = false;
  std::string note;
};

struct SolverOptions {
  int grid_points = 200;
  double golden_rel_tol = 1e-6;
  double bisection_rel_tol = 1e-10;
  int tier_fee1_points = 30;
  int tier_fee2_points = 30;
  int tier_cap_points = 20;
  int tier_refine_iterations = 60;
  bool congestion_local_pass = true;
  int congestion_max_passes = 50;
  double congestion_rel_tol = 1e-4;
  double congestion_step = 0.05;
  int congestion_rounds = 8;
  bool keep_trace = true;
};

/// A population prepared for repeated price evaluation.
class Market {
 public:
  explicit Market(const Population& population);

  const ModelConfig& config() const { return config_; }
  std::span<const UserModel> users() const { return users_; }
  double capacity() const { return config_.capacity_per_cell; }
  void set_capacity(double capacity);

  MarketOutcome evaluate(const PricingScheme& scheme,
                         std::vector<UserResponse>* responses = nullptr) const;

 private:
  ModelConfig config_;
  std::vector<UserModel> users_;
};

/// Definition of saturation: peak per-cell load within 0.5% of capacity.
Saturation classify_saturation(const EquilibriumResult& result, const ModelConfig& cfg);
Saturation classify_saturation(const MarketOutcome& outcome);

/// Capacity threshold of the unit price in the homogeneous market (0 when it never binds).
double volume_min_price(const AnalyticParams<double>& a);
/// Root of the flat revenue below the revenue-maximizing fee (0 when eta is 0).
double flat_zero_revenue_price(const AnalyticParams<double>& a);
/// max(capacity threshold, zero-revenue fee).
double flat_threshold_price(const AnalyticParams<double>& a);

EquilibriumResult solve_flat_analytic(const AnalyticParams<double>& a);
EquilibriumResult solve_volume_analytic(const AnalyticParams<double>& a);

EquilibriumResult solve_numeric(const Market& market, SchemeFamily family,
                                const SolverOptions& options = {});

/// Price matrix base * max(0, 1 + beta * indicator).
Eigen::MatrixXd congestion_matrix(double base, double beta, const Eigen::MatrixXd& indicator);

/// Relative deviation of each (slot, cell) load from the mean load.
Eigen::MatrixXd load_indicator(const Eigen::MatrixXd& cell_load);

}  // namespace offload
