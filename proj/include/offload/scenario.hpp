#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace offload {

inline constexpr double kDaysPerMonth = 30.0;

/// Global model parameters shared by every user and the provider.
struct ModelConfig {
  int num_cells = 31;
  int users_per_cell = 1000;
  int num_slots = 24;
  double slot_duration_hours = 1.0;
  double capacity_per_cell = 3600.0;  // MB per slot
  double theta = 0.5;
  double eta = 0.1;
  int max_deadline_slots = 6;
  std::uint64_t rng_seed = 1;

  int num_users() const { return num_cells * users_per_cell; }
  int slot_minutes() const;
  void validate() const;
};

/// Upper-truncated power law with pdf x^-sigma / Z on (0, phi_max].
struct DemandDistribution {
  double sigma = 0.57;
  double phi_max = 144.0;

  double normalizer() const;
  double mean() const;
  double cdf(double x) const;
  double quantile(double u) const;
  void validate() const;

  static DemandDistribution with_mean(double sigma, double mean);
};

double monthly_to_daily(double volume_per_month);
double daily_to_monthly(double volume_per_day);

/// Inverse-CDF sampling, one uniform per draw.
std::vector<double> sample_demands(const DemandDistribution& dist, int n, std::mt19937_64& rng);

/// Latin-hypercube variant: one draw per equal-probability stratum, shuffled.
std::vector<double> sample_demands_stratified(const DemandDistribution& dist, int n,
                                              std::mt19937_64& rng);

/// Deadlines (minutes) on which contact probabilities and delay shares live.
const std::vector<int>& default_deadline_grid();

/// Share of demand tolerating each deadline, keyed by deadline in minutes.
struct DelayProfile {
  std::map<int, double> shares;

  void validate(int max_deadline_minutes) const;
  /// Shares aligned with a deadline grid; throws if a key is off-grid.
  Eigen::VectorXd on_grid(const std::vector<int>& grid) const;
};

enum class TrafficClass { video, data, p2p, audio };
inline constexpr std::array<TrafficClass, 4> kTrafficClasses = {
    TrafficClass::video, TrafficClass::data, TrafficClass::p2p, TrafficClass::audio};

struct ClassMix {
  std::array<double, 4> share = {0.664, 0.209, 0.061, 0.066};
  void validate() const;
};

/// Per-class deadlines in minutes for a named scenario (zero, short, medium, long).
std::array<int, 4> scenario_deadlines(std::string_view scenario);
DelayProfile build_delay_profile(std::string_view scenario, const ClassMix& mix);
DelayProfile build_delay_profile(const std::array<int, 4>& deadlines, const ClassMix& mix);
/// Population-weighted blend of named scenarios, e.g. {{"zero", 0.5}, {"long", 0.5}}.
DelayProfile blend_delay_profiles(const std::map<std::string, double>& portions,
                                  const ClassMix& mix);

Eigen::VectorXd build_temporal_weights(const Eigen::VectorXd& usage_pattern);
Eigen::VectorXd build_willingness(const Eigen::VectorXd& weights, double theta, double nu);
Eigen::VectorXd build_willingness(const Eigen::VectorXd& weights, double theta,
                                  std::mt19937_64& rng);

/// Two-mode raised-cosine traffic shapes for office and residential cells.
struct DiurnalConfig {
  double office_peak_slot = 14.0;
  double residential_peak_slot = 21.0;
  double office_peak_to_trough = 6.0;
  double residential_peak_to_trough = 3.0;
  /// Office activity is concentrated in [office_open, office_close); outside it
  /// the office pattern sits at its trough.
  double office_open_slot = 8.0;
  double office_close_slot = 20.0;
  void validate() const;
};

Eigen::VectorXd office_pattern(const DiurnalConfig& cfg, int num_slots);
Eigen::VectorXd residential_pattern(const DiurnalConfig& cfg, int num_slots);

/// One user's static description.
struct UserProfile {
  double daily_demand = 0.0;
  Eigen::VectorXd temporal_weight;
  Eigen::VectorXd willingness;
  DelayProfile delay_profile;
  Eigen::MatrixXd wifi_contact;  // deadline-grid row x slot
  Eigen::VectorXi cell_path;
  double disutility_factor = 0.0;
  /// Population mass carried by this user; 1 for sampled users.
  double weight = 1.0;

  Eigen::VectorXd demand() const { return daily_demand * temporal_weight; }
};

/// Every invariant a profile breaks, as human-readable messages.
std::vector<std::string> validate_profile(const UserProfile& user, const ModelConfig& cfg,
                                          const std::vector<int>& deadline_grid);

/// Independent generator for (seed, stream, index); stable across runs and platforms.
std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

namespace streams {
inline constexpr std::uint64_t demand = 1;
inline constexpr std::uint64_t willingness = 2;
inline constexpr std::uint64_t path = 3;
inline constexpr std::uint64_t contact = 4;
inline constexpr std::uint64_t cells = 5;
inline constexpr std::uint64_t realization = 6;
}  // namespace streams

}  // namespace offload
