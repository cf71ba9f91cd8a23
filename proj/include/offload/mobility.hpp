#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "offload/scenario.hpp"

namespace offload {

/// Inputs to the cell-association path generator.
struct MobilityConfig {
  int num_cells = 31;
  int office_cells = 12;
  int residential_cells = 19;
  /// Distinct cells visited per day -> probability.
  std::map<int, double> visited_bs_distribution;
  /// Slot x cell traffic-shape weights; a slot's row, normalized, is the occupancy share.
  Eigen::MatrixXd cell_attraction;

  void validate() const;
};

/// Truncated geometric law over 1..max_count whose mean is `mean`.
std::map<int, double> geometric_visits(double mean, int max_count);

/// Per-cell popularity multipliers, lognormal with log-sd `spread`, mean 1.
Eigen::VectorXd draw_cell_popularity(int num_cells, double spread, std::uint64_t seed);

/// Office cells come first, then residential cells.
Eigen::MatrixXd build_cell_attraction(const DiurnalConfig& diurnal, int num_slots,
                                      int office_cells, int residential_cells,
                                      const Eigen::VectorXd& popularity);

/// Network-wide usage pattern: column sums of the attraction matrix.
Eigen::VectorXd network_usage_pattern(const Eigen::MatrixXd& cell_attraction);

/// Expected occupancy share of each cell per slot (rows sum to 1).
Eigen::MatrixXd occupancy_share(const Eigen::MatrixXd& cell_attraction);

/// Per-user WiFi contact statistics.
struct ContactModel {
  std::vector<int> deadline_grid = default_deadline_grid();
  std::vector<double> mean_contact = {0.56, 0.70, 0.76, 0.80, 0.85, 0.88};
  /// 0 gives every user and slot the mean; larger values spread users around it.
  double heterogeneity = 0.35;
  /// Beta shape of the per-user miss propensity (its complement is mobility quality).
  double propensity_a = 0.5;
  double propensity_b = 1.5;
  /// Contact boost inside the home window, applied to the miss probability.
  /// Inactive when heterogeneity is 0.
  double home_boost = 1.2;
  int home_start_slot = 22;
  int home_slots = 9;

  void validate(int num_slots) const;
};

struct ContactDiagnostics {
  long long clamped = 0;
};

/// Slot multipliers on the miss probability: 1/boost at home, mean-preserving elsewhere.
Eigen::VectorXd home_miss_modulation(const ContactModel& model, int num_slots);

std::vector<Eigen::VectorXi> generate_cell_paths(const MobilityConfig& cfg, int n, int num_slots,
                                                 std::uint64_t seed);

/// Each matrix is deadline-grid row x slot.
std::vector<Eigen::MatrixXd> generate_contacts(const ContactModel& model, int n, int num_slots,
                                               std::uint64_t seed,
                                               ContactDiagnostics* diagnostics = nullptr);

}  // namespace offload
