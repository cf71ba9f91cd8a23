#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "offload/pricing.hpp"
#include "offload/scenario.hpp"

namespace offload {

/// One user's best response to a price.
struct UserResponse {
  Eigen::VectorXd x;  // generated traffic per slot
  Eigen::VectorXd y;  // expected 3G traffic per transmission slot
  bool subscribed = false;
  bool adopts_delayed = true;
  /// 0 none, 1 or 2 under two-tier pricing.
  int tier = 0;
  double payment = 0.0;
  /// Utility actually enjoyed (after any delay disutility).
  double utility = 0.0;
  double net_utility = 0.0;
};

/// Per-user quantities precomputed once and reused by every price evaluation.
class UserModel {
 public:
  UserModel(const UserProfile& profile, const ModelConfig& cfg, const std::vector<int>& deadline_grid);

  struct Deferral {
    int shift = 0;               // slots between generation and transmission
    Eigen::VectorXd rate;        // share of x(t) that reaches 3G after `shift` slots
  };

  int num_slots() const { return static_cast<int>(phi_.size()); }
  double theta() const { return theta_; }
  double weight() const { return weight_; }
  double disutility() const { return disutility_; }
  const Eigen::VectorXd& demand() const { return phi_; }
  const Eigen::VectorXd& willingness() const { return gamma_; }
  /// Expected 3G fraction of traffic generated at each slot.
  const Eigen::VectorXd& kappa() const { return kappa_; }
  /// Same, with every deferrable share forced onto deadline 0.
  const Eigen::VectorXd& kappa_on_the_spot() const { return kappa_spot_; }
  const Eigen::VectorXi& cell_path() const { return path_; }
  const std::vector<Deferral>& deferrals() const { return deferral_; }
  /// Sum over slots of willingness * demand^theta.
  double full_utility() const { return full_utility_; }

  Eigen::VectorXd expected_3g(const Eigen::VectorXd& x) const;
  Eigen::VectorXd expected_3g_on_the_spot(const Eigen::VectorXd& x) const;
  /// Price per unit of traffic generated at slot t when transmission slots are charged
  /// price(slot, cell on path at that slot).
  Eigen::VectorXd effective_price(const Eigen::MatrixXd& price) const;
  /// sum_t scale * gamma(t) * x(t)^theta
  double utility(const Eigen::VectorXd& x, double scale = 1.0) const;

 private:
  Eigen::VectorXd phi_, gamma_, kappa_, kappa_spot_;
  Eigen::VectorXi path_;
  std::vector<Deferral> deferral_;
  double theta_ = 0.5, weight_ = 1.0, disutility_ = 0.0, full_utility_ = 0.0;
};

std::vector<UserModel> make_user_models(const std::vector<UserProfile>& users,
                                        const ModelConfig& cfg, const std::vector<int>& grid);

/// y(t) = sum_d b^d(t-d) x(t-d), slots wrapping modulo T.
Eigen::VectorXd expected_3g(const Eigen::VectorXd& x, const UserProfile& profile,
                            const ModelConfig& cfg, const std::vector<int>& deadline_grid);

/// Per-slot optimum of scale*gamma*x^theta - price*x capped at demand. Zero price
/// consumes the whole demand.
Eigen::VectorXd iso_elastic_optimum(const Eigen::VectorXd& demand, const Eigen::VectorXd& gamma,
                                    const Eigen::VectorXd& price, double theta, double scale = 1.0);

UserResponse respond_flat(const UserModel& user, double fee);
UserResponse respond_volume(const UserModel& user, double unit_price);
UserResponse respond_congestion(const UserModel& user, const Eigen::MatrixXd& price);
UserResponse respond_two_tier(const UserModel& user, double fee1, double fee2, double cap1);
UserResponse respond_with_disutility(const UserModel& user, double unit_price, double factor);
UserResponse respond(const UserModel& user, const PricingScheme& scheme);

/// Tier-1 allocation: maximize utility subject to sum kappa*x <= cap, x <= demand.
Eigen::VectorXd water_fill(const UserModel& user, double cap);

/// One Monte-Carlo draw of 3G traffic: each deferrable share either meets WiFi
/// within its deadline or reaches 3G at its deadline slot. Diagnostic only.
Eigen::VectorXd realize_3g(const Eigen::VectorXd& x, const UserProfile& profile,
                           const ModelConfig& cfg, const std::vector<int>& deadline_grid,
                           std::mt19937_64& rng);

}  // namespace offload
