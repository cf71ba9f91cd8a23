#include "offload/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "offload/errors.hpp"

namespace offload {

int ModelConfig::slot_minutes() const {
  return static_cast<int>(std::lround(slot_duration_hours * 60.0));
}

void ModelConfig::validate() const {
  if (num_cells < 1) throw ConfigError("num_cells must be >= 1");
  if (users_per_cell < 1) throw ConfigError("users_per_cell must be >= 1");
  if (num_slots < 1) throw ConfigError("num_slots must be >= 1");
  if (!(slot_duration_hours > 0.0)) throw ConfigError("slot_duration must be positive");
  if (!(capacity_per_cell > 0.0)) throw ConfigError("capacity_per_cell must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
  if (!(eta >= 0.0)) throw ConfigError("eta must be non-negative");
  if (max_deadline_slots < 0 || max_deadline_slots >= num_slots)
    throw ConfigError("max_deadline must lie in [0, num_slots)");
}

double DemandDistribution::normalizer() const {
  return std::pow(phi_max, 1.0 - sigma) / (1.0 - sigma);
}

double DemandDistribution::mean() const { return (1.0 - sigma) / (2.0 - sigma) * phi_max; }

double DemandDistribution::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= phi_max) return 1.0;
  return std::pow(x / phi_max, 1.0 - sigma);
}

double DemandDistribution::quantile(double u) const {
  if (!(u > 0.0 && u <= 1.0)) throw DomainError("quantile level must lie in (0,1]");
  return phi_max * std::pow(u, 1.0 / (1.0 - sigma));
}

void DemandDistribution::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) throw ConfigError("sigma must lie in (0,1)");
  if (!(phi_max > 0.0) || !std::isfinite(phi_max)) throw ConfigError("phi_max must be positive");
  const double z = normalizer();
  if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError("demand normalizer is not finite");
}

DemandDistribution DemandDistribution::with_mean(double sigma, double mean) {
  DemandDistribution d{sigma, 1.0};
  if (!(mean > 0.0)) throw ConfigError("mean demand must be positive");
  d.phi_max = mean * (2.0 - sigma) / (1.0 - sigma);
  d.validate();
  return d;
}

double monthly_to_daily(double volume_per_month) { return volume_per_month / kDaysPerMonth; }
double daily_to_monthly(double volume_per_day) { return volume_per_day * kDaysPerMonth; }

namespace {

// Uniform on (0, 1]: generate_canonical yields [0, 1).
double open_closed_uniform(std::mt19937_64& rng) {
  return 1.0 - std::generate_canonical<double, 64>(rng);
}

}  // namespace

std::vector<double> sample_demands(const DemandDistribution& dist, int n, std::mt19937_64& rng) {
  dist.validate();
  if (n < 1) throw ConfigError("sample count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& v : out) v = dist.quantile(open_closed_uniform(rng));
  return out;
}

std::vector<double> sample_demands_stratified(const DemandDistribution& dist, int n,
                                              std::mt19937_64& rng) {
  dist.validate();
  if (n < 1) throw ConfigError("sample count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = (k + open_closed_uniform(rng)) / n;
    out[static_cast<std::size_t>(k)] = dist.quantile(std::clamp(u, 1e-300, 1.0));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

const std::vector<int>& default_deadline_grid() {
  static const std::vector<int> grid = {0, 10, 30, 60, 120, 360};
  return grid;
}

void DelayProfile::validate(int max_deadline_minutes) const {
  if (shares.empty()) throw ConfigError("delay profile is empty");
  double total = 0.0;
  for (const auto& [d, a] : shares) {
    if (d < 0 || d > max_deadline_minutes)
      throw ConfigError("delay profile deadline " + std::to_string(d) + " min out of range");
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("delay share outside [0,1]");
    total += a;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("delay shares must sum to 1");
}

Eigen::VectorXd DelayProfile::on_grid(const std::vector<int>& grid) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
  for (const auto& [d, a] : shares) {
    auto it = std::find(grid.begin(), grid.end(), d);
    if (it == grid.end())
      throw ConfigError("deadline " + std::to_string(d) + " min is not on the contact grid");
    out(it - grid.begin()) += a;
  }
  return out;
}

void ClassMix::validate() const {
  double total = 0.0;
  for (double s : share) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("class share outside [0,1]");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("class mix must sum to 1");
}

std::array<int, 4> scenario_deadlines(std::string_view scenario) {
  // video, data, p2p, audio
  if (scenario == "zero") return {0, 0, 0, 0};
  if (scenario == "short") return {10, 30, 10, 0};
  if (scenario == "medium") return {30, 60, 30, 0};
  if (scenario == "long") return {120, 360, 120, 0};
  throw ConfigError("unknown delay scenario '" + std::string(scenario) + "'");
}

DelayProfile build_delay_profile(const std::array<int, 4>& deadlines, const ClassMix& mix) {
  mix.validate();
  DelayProfile p;
  for (std::size_t c = 0; c < deadlines.size(); ++c) {
    if (mix.share[c] > 0.0) p.shares[deadlines[c]] += mix.share[c];
  }
  return p;
}

DelayProfile build_delay_profile(std::string_view scenario, const ClassMix& mix) {
  return build_delay_profile(scenario_deadlines(scenario), mix);
}

DelayProfile blend_delay_profiles(const std::map<std::string, double>& portions,
                                  const ClassMix& mix) {
  double total = 0.0;
  for (const auto& [name, w] : portions) {
    if (!(w >= 0.0)) throw ConfigError("scenario portion must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("scenario portions must sum to 1");
  DelayProfile out;
  for (const auto& [name, w] : portions) {
    if (w == 0.0) {
      scenario_deadlines(name);
      continue;
    }
    for (const auto& [d, a] : build_delay_profile(name, mix).shares) out.shares[d] += w * a;
  }
  return out;
}

Eigen::VectorXd build_temporal_weights(const Eigen::VectorXd& usage_pattern) {
  if (usage_pattern.size() == 0) throw ConfigError("usage pattern is empty");
  if ((usage_pattern.array() < 0.0).any() || !usage_pattern.allFinite())
    throw ConfigError("usage pattern must be finite and non-negative");
  const double total = usage_pattern.sum();
  if (!(total > 0.0)) throw ConfigError("usage pattern has no positive entry");
  return usage_pattern / total;
}

Eigen::VectorXd build_willingness(const Eigen::VectorXd& weights, double theta, double nu) {
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
  return nu * weights.array().pow(1.0 - theta).matrix();
}

Eigen::VectorXd build_willingness(const Eigen::VectorXd& weights, double theta,
                                  std::mt19937_64& rng) {
  // nu uniform on (0, 1)
  double nu = 0.0;
  while (nu == 0.0) nu = std::generate_canonical<double, 64>(rng);
  return build_willingness(weights, theta, nu);
}

void DiurnalConfig::validate() const {
  if (!(office_peak_to_trough >= 1.0) || !(residential_peak_to_trough >= 1.0))
    throw ConfigError("peak/trough ratio must be >= 1");
  if (!(office_close_slot > office_open_slot)) throw ConfigError("office window is empty");
  if (!(office_peak_slot >= office_open_slot && office_peak_slot < office_close_slot))
    throw ConfigError("office peak must fall inside the office window");
}

namespace {

double hour_of_slot(int t, int num_slots) { return (t + 0.5) * 24.0 / num_slots; }

double raised_cosine(double x, double period, double ratio) {
  return 1.0 + (ratio - 1.0) * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * x / period));
}

}  // namespace

Eigen::VectorXd office_pattern(const DiurnalConfig& cfg, int num_slots) {
  cfg.validate();
  Eigen::VectorXd out(num_slots);
  const double open = cfg.office_open_slot, close = cfg.office_close_slot;
  for (int t = 0; t < num_slots; ++t) {
    const double h = hour_of_slot(t, num_slots);
    if (h < open || h >= close) {
      out(t) = 1.0;
      continue;
    }
    // Two half-cosines so the peak can sit anywhere inside the window.
    const double peak = cfg.office_peak_slot;
    const double half = h < peak ? peak - open : close - peak;
    out(t) = raised_cosine(h - peak, 2.0 * half, cfg.office_peak_to_trough);
  }
  return out;
}

Eigen::VectorXd residential_pattern(const DiurnalConfig& cfg, int num_slots) {
  cfg.validate();
  Eigen::VectorXd out(num_slots);
  for (int t = 0; t < num_slots; ++t) {
    out(t) = raised_cosine(hour_of_slot(t, num_slots) - cfg.residential_peak_slot, 24.0,
                           cfg.residential_peak_to_trough);
  }
  return out;
}

std::vector<std::string> validate_profile(const UserProfile& u, const ModelConfig& cfg,
                                          const std::vector<int>& grid) {
  std::vector<std::string> bad;
  const auto T = static_cast<Eigen::Index>(cfg.num_slots);
  const auto G = static_cast<Eigen::Index>(grid.size());
  if (!(u.daily_demand >= 0.0) || !std::isfinite(u.daily_demand))
    bad.push_back("daily demand not finite and non-negative");
  if (u.temporal_weight.size() != T) {
    bad.push_back("temporal weight length != num_slots");
  } else {
    if ((u.temporal_weight.array() < 0.0).any()) bad.push_back("negative temporal weight");
    if (std::abs(u.temporal_weight.sum() - 1.0) > 1e-9) bad.push_back("temporal weights do not sum to 1");
    const double phi_sum = u.demand().sum();
    if (std::abs(phi_sum - u.daily_demand) > 1e-9 * std::max(1.0, u.daily_demand))
      bad.push_back("per-slot demand does not recover daily demand");
  }
  if (u.willingness.size() != T) bad.push_back("willingness length != num_slots");
  else if ((u.willingness.array() < 0.0).any()) bad.push_back("negative willingness");
  try {
    u.delay_profile.validate(cfg.max_deadline_slots * cfg.slot_minutes());
    u.delay_profile.on_grid(grid);
  } catch (const ConfigError& e) {
    bad.emplace_back(e.what());
  }
  if (u.wifi_contact.rows() != G || u.wifi_contact.cols() != T) {
    bad.push_back("contact matrix shape mismatch");
  } else {
    if ((u.wifi_contact.array() < 0.0).any() || (u.wifi_contact.array() > 1.0).any())
      bad.push_back("contact probability outside [0,1]");
    for (Eigen::Index g = 1; g < G; ++g) {
      if ((u.wifi_contact.row(g).array() < u.wifi_contact.row(g - 1).array()).any()) {
        bad.push_back("contact probability decreases with deadline");
        break;
      }
    }
  }
  if (u.cell_path.size() != T) bad.push_back("cell path length != num_slots");
  else if ((u.cell_path.array() < 0).any() || (u.cell_path.array() >= cfg.num_cells).any())
    bad.push_back("cell id out of range");
  if (!(u.disutility_factor >= 0.0 && u.disutility_factor <= 1.0))
    bad.push_back("disutility factor outside [0,1]");
  if (!(u.weight > 0.0)) bad.push_back("non-positive population weight");
  return bad;
}

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace offload
