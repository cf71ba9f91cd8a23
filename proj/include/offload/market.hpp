#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "offload/pricing.hpp"
#include "offload/scenario.hpp"
#include "offload/user_response.hpp"

namespace offload {

/// Market-level aggregates of one price point.
struct MarketOutcome {
  Eigen::VectorXd total_x;     // X(t)
  Eigen::VectorXd total_y;     // Y(t)
  Eigen::MatrixXd cell_load;   // slot x cell expected 3G load
  double kappa_avg = 0.0;
  double kappa_peak = 0.0;
  /// max over (slot, cell) of load / total generated traffic.
  double kappa_peak_cell = 0.0;
  double peak_cell_load = 0.0;
  double capacity = 0.0;
  double revenue = 0.0;
  double surplus = 0.0;
  double welfare = 0.0;
  double subscription_ratio = 0.0;
  double payment_per_unit_traffic = 0.0;
  /// Fraction of subscribers that adopt delayed offloading.
  double adoption_fraction = 0.0;
  double population = 0.0;
  bool feasible = false;
  /// Set when no traffic is generated and the kappas default to 0.
  bool kappa_undefined = false;
};

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

MarketOutcome aggregate(std::span<const UserResponse> responses, std::span<const UserModel> users,
                        const ModelConfig& cfg);

/// Per-slot variance across cells of load / capacity.
Eigen::VectorXd cell_load_variance(const MarketOutcome& outcome);

/// One row per slot: slot, X, Y, then one column per cell.
void write_outcome_csv(std::ostream& os, const MarketOutcome& outcome);
/// key,value rows with kappas, revenue, surplus, welfare and ratios.
void write_summary_csv(std::ostream& os, const MarketOutcome& outcome, const std::string& scheme);

/// Fixed, locale-independent formatting used by every CSV writer.
std::string format_number(double v);

}  // namespace offload
