#include "offload/user_response.hpp"

#include <cmath>
#include <limits>

#include "offload/errors.hpp"

namespace offload {

UserModel::UserModel(const UserProfile& u, const ModelConfig& cfg, const std::vector<int>& grid)
    : phi_(u.demand()),
      gamma_(u.willingness),
      path_(u.cell_path),
      theta_(cfg.theta),
      weight_(u.weight),
      disutility_(u.disutility_factor) {
  const int T = cfg.num_slots;
  const int slot_minutes = cfg.slot_minutes();
  if (phi_.size() != T || gamma_.size() != T || path_.size() != T)
    throw ConfigError("user profile length does not match num_slots");
  if (u.wifi_contact.rows() != static_cast<Eigen::Index>(grid.size()) || u.wifi_contact.cols() != T)
    throw ConfigError("contact matrix shape does not match the deadline grid");
  const Eigen::VectorXd alpha = u.delay_profile.on_grid(grid);
  kappa_ = Eigen::VectorXd::Zero(T);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto gi = static_cast<Eigen::Index>(g);
    if (alpha(gi) == 0.0) continue;
    const int shift = grid[g] / slot_minutes;
    if (shift >= T) throw ConfigError("deadline reaches past one day");
    Eigen::VectorXd rate = alpha(gi) * (1.0 - u.wifi_contact.row(gi).transpose().array()).matrix();
    kappa_ += rate;
    bool merged = false;
    for (auto& d : deferral_) {
      if (d.shift == shift) {
        d.rate += rate;
        merged = true;
      }
    }
    if (!merged) deferral_.push_back({shift, std::move(rate)});
  }
  kappa_spot_ = (1.0 - u.wifi_contact.row(0).transpose().array()).matrix();
  full_utility_ = utility(phi_);
}

Eigen::VectorXd UserModel::expected_3g(const Eigen::VectorXd& x) const {
  const int T = num_slots();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(T);
  for (const auto& d : deferral_) {
    for (int t = 0; t < T; ++t) y((t + d.shift) % T) += d.rate(t) * x(t);
  }
  return y;
}

Eigen::VectorXd UserModel::expected_3g_on_the_spot(const Eigen::VectorXd& x) const {
  return kappa_spot_.cwiseProduct(x);
}

Eigen::VectorXd UserModel::effective_price(const Eigen::MatrixXd& price) const {
  const int T = num_slots();
  if (price.rows() != T) throw ContractViolation("price matrix rows != num_slots");
  Eigen::VectorXd p = Eigen::VectorXd::Zero(T);
  for (const auto& d : deferral_) {
    for (int t = 0; t < T; ++t) {
      const int tx = (t + d.shift) % T;
      const int cell = path_(tx);
      if (cell < 0 || cell >= price.cols()) throw ContractViolation("cell id outside price matrix");
      p(t) += d.rate(t) * price(tx, cell);
    }
  }
  return p;
}

double UserModel::utility(const Eigen::VectorXd& x, double scale) const {
  double s = 0.0;
  for (int t = 0; t < num_slots(); ++t) {
    if (x(t) > 0.0) s += gamma_(t) * std::pow(x(t), theta_);
  }
  return scale * s;
}

std::vector<UserModel> make_user_models(const std::vector<UserProfile>& users,
                                        const ModelConfig& cfg, const std::vector<int>& grid) {
  std::vector<UserModel> out;
  out.reserve(users.size());
  for (const auto& u : users) out.emplace_back(u, cfg, grid);
  return out;
}

Eigen::VectorXd expected_3g(const Eigen::VectorXd& x, const UserProfile& profile,
                            const ModelConfig& cfg, const std::vector<int>& grid) {
  return UserModel(profile, cfg, grid).expected_3g(x);
}

Eigen::VectorXd iso_elastic_optimum(const Eigen::VectorXd& phi, const Eigen::VectorXd& gamma,
                                    const Eigen::VectorXd& price, double theta, double scale) {
  const double expo = 1.0 / (1.0 - theta);
  Eigen::VectorXd x(phi.size());
  for (Eigen::Index t = 0; t < phi.size(); ++t) {
    if (phi(t) <= 0.0) x(t) = 0.0;
    else if (price(t) <= 0.0) x(t) = phi(t);
    else if (gamma(t) <= 0.0 || scale <= 0.0) x(t) = 0.0;
    else x(t) = std::min(phi(t), std::pow(theta * scale * gamma(t) / price(t), expo));
  }
  return x;
}

namespace {

UserResponse finish(const UserModel& u, Eigen::VectorXd x, Eigen::VectorXd y, double pay,
                    double scale) {
  UserResponse r;
  r.subscribed = true;
  r.utility = u.utility(x, scale);
  r.payment = pay;
  r.net_utility = r.utility - pay;
  r.x = std::move(x);
  r.y = std::move(y);
  return r;
}

UserResponse unsubscribed(const UserModel& u) {
  UserResponse r;
  r.x = Eigen::VectorXd::Zero(u.num_slots());
  r.y = Eigen::VectorXd::Zero(u.num_slots());
  r.adopts_delayed = false;
  return r;
}

void require_price(double p, const char* what) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw ContractViolation(std::string(what) + " must be finite and >= 0");
}

}  // namespace

UserResponse respond_flat(const UserModel& u, double fee) {
  require_price(fee, "flat fee");
  if (!(u.full_utility() - fee > 0.0)) return unsubscribed(u);
  Eigen::VectorXd y = u.expected_3g(u.demand());
  UserResponse r = finish(u, u.demand(), std::move(y), fee, 1.0);
  r.tier = 1;
  return r;
}

UserResponse respond_volume(const UserModel& u, double p) {
  require_price(p, "unit price");
  Eigen::VectorXd x = iso_elastic_optimum(u.demand(), u.willingness(), p * u.kappa(), u.theta());
  Eigen::VectorXd y = u.expected_3g(x);
  const double pay = p * y.sum();
  return finish(u, std::move(x), std::move(y), pay, 1.0);
}

UserResponse respond_congestion(const UserModel& u, const Eigen::MatrixXd& price) {
  if ((price.array() < 0.0).any() || !price.allFinite())
    throw ContractViolation("congestion prices must be finite and >= 0");
  Eigen::VectorXd x =
      iso_elastic_optimum(u.demand(), u.willingness(), u.effective_price(price), u.theta());
  Eigen::VectorXd y = u.expected_3g(x);
  double pay = 0.0;
  for (int t = 0; t < u.num_slots(); ++t) pay += price(t, u.cell_path()(t)) * y(t);
  return finish(u, std::move(x), std::move(y), pay, 1.0);
}

Eigen::VectorXd water_fill(const UserModel& u, double cap) {
  const Eigen::VectorXd& phi = u.demand();
  const Eigen::VectorXd& k = u.kappa();
  const double theta = u.theta();
  if (phi.dot(k) <= cap) return phi;
  auto alloc = [&](double lambda) {
    return iso_elastic_optimum(phi, u.willingness(), lambda * k, theta);
  };
  auto load = [&](double lambda) { return alloc(lambda).dot(k); };
  // load(lambda) is non-increasing; bracket in log space.
  double lo = 1.0, hi = 1.0;
  while (load(lo) <= cap && lo > 1e-300) lo *= 1e-3;
  while (load(hi) > cap) {
    hi *= 1e3;
    if (hi > 1e300) return Eigen::VectorXd::Zero(phi.size());
  }
  while (hi / lo - 1.0 > 1e-10) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (load(mid) > cap ? lo : hi) = mid;
  }
  return alloc(hi);
}

UserResponse respond_two_tier(const UserModel& u, double fee1, double fee2, double cap1) {
  require_price(fee1, "fee1");
  require_price(fee2, "fee2");
  if (fee1 > fee2) throw ContractViolation("two-tier requires fee1 <= fee2");
  if (!(cap1 > 0.0)) throw ContractViolation("two-tier cap must be positive");
  const TwoTierPricing scheme{fee1, fee2, cap1};

  Eigen::VectorXd x1 = water_fill(u, cap1);
  Eigen::VectorXd y1 = u.expected_3g(x1);
  const double pay1 = payment(scheme, y1, u.cell_path());
  const double value1 = u.utility(x1) - pay1;

  double value2 = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd y2;
  double pay2 = 0.0;
  if (u.demand().dot(u.kappa()) > cap1) {
    y2 = u.expected_3g(u.demand());
    pay2 = payment(scheme, y2, u.cell_path());
    value2 = u.full_utility() - pay2;
  }
  if (!(std::max(value1, value2) > 0.0)) return unsubscribed(u);
  UserResponse r;
  if (value1 >= value2) {
    r = finish(u, std::move(x1), std::move(y1), pay1, 1.0);
    r.tier = 1;
  } else {
    r = finish(u, u.demand(), std::move(y2), pay2, 1.0);
    r.tier = 2;
  }
  return r;
}

UserResponse respond_with_disutility(const UserModel& u, double p, double factor) {
  require_price(p, "unit price");
  if (!(factor >= 0.0 && factor <= 1.0)) throw ContractViolation("disutility factor must lie in [0,1]");
  const double scale = 1.0 - factor;
  Eigen::VectorXd xd = iso_elastic_optimum(u.demand(), u.willingness(), p * u.kappa(), u.theta(), scale);
  Eigen::VectorXd yd = u.expected_3g(xd);
  const double pay_d = p * yd.sum();
  const double value_d = u.utility(xd, scale) - pay_d;

  Eigen::VectorXd xs = iso_elastic_optimum(u.demand(), u.willingness(), p * u.kappa_on_the_spot(), u.theta());
  Eigen::VectorXd ys = u.expected_3g_on_the_spot(xs);
  const double pay_s = p * ys.sum();
  const double value_s = u.utility(xs) - pay_s;

  if (value_d >= value_s) {
    UserResponse r = finish(u, std::move(xd), std::move(yd), pay_d, scale);
    r.adopts_delayed = true;
    return r;
  }
  UserResponse r = finish(u, std::move(xs), std::move(ys), pay_s, 1.0);
  r.adopts_delayed = false;
  return r;
}

UserResponse respond(const UserModel& u, const PricingScheme& scheme) {
  switch (family_of(scheme)) {
    case SchemeFamily::flat: return respond_flat(u, std::get<FlatPricing>(scheme).fee);
    case SchemeFamily::two_tier: {
      const auto& s = std::get<TwoTierPricing>(scheme);
      return respond_two_tier(u, s.fee1, s.fee2, s.cap1);
    }
    case SchemeFamily::volume: {
      const double p = std::get<VolumePricing>(scheme).unit_price;
      return u.disutility() > 0.0 ? respond_with_disutility(u, p, u.disutility()) : respond_volume(u, p);
    }
    case SchemeFamily::congestion:
      return respond_congestion(u, std::get<CongestionPricing>(scheme).unit_price);
  }
  throw ContractViolation("unknown pricing scheme");
}

Eigen::VectorXd realize_3g(const Eigen::VectorXd& x, const UserProfile& profile,
                           const ModelConfig& cfg, const std::vector<int>& grid,
                           std::mt19937_64& rng) {
  const int T = cfg.num_slots;
  const Eigen::VectorXd alpha = profile.delay_profile.on_grid(grid);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(T);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto gi = static_cast<Eigen::Index>(g);
    if (alpha(gi) == 0.0) continue;
    const int shift = grid[g] / cfg.slot_minutes();
    for (int t = 0; t < T; ++t) {
      if (unif(rng) >= profile.wifi_contact(gi, t)) y((t + shift) % T) += alpha(gi) * x(t);
    }
  }
  return y;
}

}  // namespace offload
