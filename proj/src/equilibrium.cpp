#include "offload/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <tuple>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "offload/errors.hpp"
#include "offload/optimize.hpp"

namespace offload {

namespace {

constexpr double kSaturationBand = 0.005;

double toms_root(const std::function<double(double)>& f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

}  // namespace

std::string_view to_string(Saturation s) {
  switch (s) {
    case Saturation::opt_saturated: return "opt_saturated";
    case Saturation::opt_unsaturated: return "opt_unsaturated";
    case Saturation::infeasible: return "infeasible";
  }
  return "unknown";
}

Saturation classify_saturation(const MarketOutcome& o) {
  if (!o.feasible) return Saturation::infeasible;
  return o.peak_cell_load >= (1.0 - kSaturationBand) * o.capacity ? Saturation::opt_saturated
                                                                   : Saturation::opt_unsaturated;
}

Saturation classify_saturation(const EquilibriumResult& r, const ModelConfig& cfg) {
  MarketOutcome o = r.outcome;
  o.capacity = cfg.capacity_per_cell;
  return classify_saturation(o);
}

// ---------------------------------------------------------------- analytic

double flat_zero_revenue_price(const AnalyticParams<double>& a) {
  a.validate();
  if (!(a.eta > 0.0)) return 0.0;
  const double pmax = a.max_flat_price();
  const double hi_bound = std::min(flat::inflection_price(a), pmax * (1.0 - 1e-12));
  const double p_hat = toms_root([&](double p) { return flat::revenue_derivative(a, p); },
                                 1e-300, hi_bound);
  if (!(flat::revenue(a, p_hat) > 0.0)) return p_hat;
  return toms_root([&](double p) { return flat::revenue(a, p); }, 0.0, p_hat);
}

double flat_threshold_price(const AnalyticParams<double>& a) {
  return std::max(flat::min_price(a), flat_zero_revenue_price(a));
}

double volume_min_price(const AnalyticParams<double>& a) {
  a.validate();
  const double full = a.kappa_peak * a.n_hat * a.mean_demand();
  if (!(full > a.capacity)) return 0.0;
  const double target = a.capacity / (a.kappa_peak * a.n_hat);
  auto traffic_at = [&](double q) {
    return q * (1.0 - std::pow(q / a.phi_max, 1.0 - a.sigma) / (2.0 - a.sigma)) - target;
  };
  const double q = toms_root(traffic_at, 0.0, a.phi_max);
  return a.theta / (a.kappa_avg * std::pow(q, 1.0 - a.theta));
}

namespace {

MarketOutcome analytic_outcome(const AnalyticParams<double>& a) {
  MarketOutcome o;
  o.capacity = a.capacity;
  o.population = a.n_hat;
  o.kappa_avg = a.kappa_avg;
  o.kappa_peak = a.kappa_peak;
  o.kappa_peak_cell = a.kappa_peak;
  return o;
}

}  // namespace

EquilibriumResult solve_flat_analytic(const AnalyticParams<double>& a) {
  a.validate();
  EquilibriumResult r;
  r.outcome = analytic_outcome(a);
  if (!(a.eta < a.eta_bound())) {
    r.saturation = Saturation::infeasible;
    r.note = "cost coefficient too high for positive revenue";
    return r;
  }
  const double pmax = a.max_flat_price();
  const double hi_bound = std::min(flat::inflection_price(a), pmax * (1.0 - 1e-12));
  const double p_hat = toms_root([&](double p) { return flat::revenue_derivative(a, p); },
                                 1e-300, hi_bound);
  const double p0 = flat_threshold_price(a);
  r.threshold_price = p0;
  const bool saturated = p0 >= p_hat;
  const double p = saturated ? p0 : p_hat;
  r.scheme = FlatPricing{p};
  r.saturation = saturated ? Saturation::opt_saturated : Saturation::opt_unsaturated;

  MarketOutcome& o = r.outcome;
  o.revenue = flat::revenue(a, p);
  o.surplus = flat::surplus(a, p);
  o.welfare = o.surplus + o.revenue;
  o.subscription_ratio = flat::subscription_ratio(a, p);
  const double X = flat::total_traffic(a, p);
  o.payment_per_unit_traffic = X > 0.0 ? p * a.n_hat * o.subscription_ratio / X : 0.0;
  o.peak_cell_load = flat::peak_load(a, p);
  o.adoption_fraction = 1.0;
  o.feasible = o.revenue > 0.0 && o.peak_cell_load <= a.capacity * (1.0 + 1e-12);
  if (!o.feasible) r.saturation = Saturation::infeasible;
  if (r.saturation != Saturation::opt_saturated) return r;
  r.note = "optimum sits on the capacity threshold";
  return r;
}

EquilibriumResult solve_volume_analytic(const AnalyticParams<double>& a) {
  a.validate();
  EquilibriumResult r;
  r.outcome = analytic_outcome(a);
  const double p_min = volume_min_price(a);
  const double p0 = std::max(p_min, a.eta);
  r.threshold_price = p0;

  auto ratio = [&](double p) { return volume::marginal_ratio(a, p); };
  double lo = std::max({a.eta, volume::uncapped_price(a), 1e-300});
  double hi = 2.0 * lo;
  while (ratio(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw DomainError("volume: marginal revenue never turns negative");
  }
  const double p_hat = toms_root(ratio, lo, hi);
  const bool saturated = p0 >= p_hat;
  const double p = saturated ? p0 : p_hat;
  r.scheme = VolumePricing{p};
  r.saturation = saturated ? Saturation::opt_saturated : Saturation::opt_unsaturated;

  MarketOutcome& o = r.outcome;
  o.revenue = volume::revenue(a, p);
  o.surplus = volume::surplus(a, p);
  o.welfare = o.surplus + o.revenue;
  o.subscription_ratio = 1.0;
  o.payment_per_unit_traffic = p * a.kappa_avg;
  o.peak_cell_load = volume::peak_load(a, p);
  o.adoption_fraction = 1.0;
  o.feasible = o.revenue > 0.0 && o.peak_cell_load <= a.capacity * (1.0 + 1e-12);
  if (!o.feasible) r.saturation = Saturation::infeasible;
  return r;
}

// ------------------------------------------------------------------ market

Market::Market(const Population& pop)
    : config_(pop.config), users_(make_user_models(pop.users, pop.config, pop.deadline_grid)) {
  config_.validate();
}

void Market::set_capacity(double capacity) {
  if (!(capacity > 0.0)) throw ConfigError("capacity must be positive");
  config_.capacity_per_cell = capacity;
}

MarketOutcome Market::evaluate(const PricingScheme& scheme, std::vector<UserResponse>* out) const {
  validate(scheme);
  std::vector<UserResponse> local;
  std::vector<UserResponse>& responses = out ? *out : local;
  responses.resize(users_.size());
  for (std::size_t i = 0; i < users_.size(); ++i) responses[i] = respond(users_[i], scheme);
  return aggregate(responses, users_, config_);
}

// ----------------------------------------------------------------- numeric

Eigen::MatrixXd load_indicator(const Eigen::MatrixXd& load) {
  const double mean = load.size() ? load.mean() : 0.0;
  if (!(mean > 0.0)) return Eigen::MatrixXd::Zero(load.rows(), load.cols());
  return (load.array() / mean - 1.0).matrix();
}

Eigen::MatrixXd congestion_matrix(double base, double beta, const Eigen::MatrixXd& indicator) {
  return (base * (1.0 + beta * indicator.array()).max(0.0)).matrix();
}

namespace {

class Search {
 public:
  Search(const Market& m, const SolverOptions& opt) : market_(m), opt_(opt) {}

  const MarketOutcome& eval(const PricingScheme& s, std::vector<double> params) {
    last_ = market_.evaluate(s);
    record(s, std::move(params), last_);
    return last_;
  }

  void record(const PricingScheme& s, std::vector<double> params, const MarketOutcome& o) {
    if (opt_.keep_trace) result_.trace.push_back({params, o.revenue, o.feasible});
    if (o.feasible && (!have_best_ || o.revenue > result_.outcome.revenue)) {
      have_best_ = true;
      result_.outcome = o;
      result_.scheme = s;
    }
  }

  double objective(const MarketOutcome& o) const {
    return o.feasible ? o.revenue : -std::numeric_limits<double>::infinity();
  }

  EquilibriumResult finish() {
    if (!have_best_) {
      result_.saturation = Saturation::infeasible;
      if (result_.note.empty()) result_.note = "no feasible price point";
      return std::move(result_);
    }
    result_.saturation = classify_saturation(result_.outcome);
    return std::move(result_);
  }

  bool have_best() const { return have_best_; }
  double best_revenue() const { return have_best_ ? result_.outcome.revenue : -std::numeric_limits<double>::infinity(); }
  EquilibriumResult& result() { return result_; }
  const Market& market() const { return market_; }
  const SolverOptions& options() const { return opt_; }

 private:
  const Market& market_;
  const SolverOptions& opt_;
  EquilibriumResult result_;
  MarketOutcome last_;
  bool have_best_ = false;
};

/// Shared one-dimensional strategy for flat and volume prices.
void search_line(Search& search, const std::function<PricingScheme(double)>& make, double lo,
                 double hi) {
  const SolverOptions& opt = search.options();
  auto f = [&](double p) { return search.objective(search.eval(make(p), {p})); };
  f(lo);
  std::vector<ScalarProbe> probes;
  const ScalarProbe golden = golden_section_max(f, lo, hi, opt.golden_rel_tol, &probes);
  const int n = std::max(opt.grid_points, 2);
  int best_k = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double p = lo + (hi - lo) * k / (n - 1);
    grid[static_cast<std::size_t>(k)] = p;
    const double v = f(p);
    if (v > best_v) {
      best_v = v;
      best_k = k;
    }
  }
  const double tol = 1e-9 * std::max(1.0, std::abs(golden.value));
  if (best_k >= 0 && std::isfinite(best_v) && best_v > golden.value + tol) {
    search.result().multimodal = true;
    search.result().note = "coarse grid beat the golden-section optimum; refined around grid best";
    const double a = grid[static_cast<std::size_t>(std::max(best_k - 1, 0))];
    const double b = grid[static_cast<std::size_t>(std::min(best_k + 1, n - 1))];
    golden_section_max(f, a, b, opt.golden_rel_tol);
  }
}

/// Smallest price keeping every cell within capacity, given that load falls with price.
double capacity_threshold(Search& search, const std::function<PricingScheme(double)>& make,
                          double lo, double hi, double rel_tol) {
  const double cap = search.market().capacity();
  auto fits = [&](double p) {
    const MarketOutcome& o = search.eval(make(p), {p});
    return o.peak_cell_load <= cap;
  };
  if (fits(lo)) return lo;
  while (!fits(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw DomainError("capacity cannot be met at any price");
  }
  return bisect_threshold(fits, lo, hi, rel_tol);
}

/// First price above `from` where revenue turns positive, refined between trace points.
double zero_revenue_threshold(Search& search, const std::function<PricingScheme(double)>& make,
                              double from, double rel_tol) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& tp : search.result().trace) {
    if (tp.params.size() == 1 && tp.params[0] >= from) pts.emplace_back(tp.params[0], tp.revenue);
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].second > 0.0) {
      if (k == 0 || pts[k].first == from) return pts[k].first;
      return bisect_threshold(
          [&](double p) { return search.eval(make(p), {p}).revenue > 0.0; }, pts[k - 1].first,
          pts[k].first, rel_tol);
    }
  }
  return from;
}

EquilibriumResult solve_flat_numeric(const Market& m, const SolverOptions& opt) {
  Search search(m, opt);
  double p_hi = 0.0;
  for (const auto& u : m.users()) p_hi = std::max(p_hi, u.full_utility());
  if (!(p_hi > 0.0)) {
    search.result().note = "no user values service";
    return search.finish();
  }
  auto make = [](double p) -> PricingScheme { return FlatPricing{p}; };
  const double p_min = capacity_threshold(search, make, 0.0, p_hi, opt.bisection_rel_tol);
  search_line(search, make, p_min, p_hi);
  search.result().threshold_price = zero_revenue_threshold(search, make, p_min, opt.bisection_rel_tol);
  return search.finish();
}

EquilibriumResult solve_volume_numeric(const Market& m, const SolverOptions& opt) {
  Search search(m, opt);
  const double eta = m.config().eta;
  auto make = [](double p) -> PricingScheme { return VolumePricing{p}; };
  const double start_hi = std::max(eta, 1e-6);
  const double p_min = capacity_threshold(search, make, 0.0, start_hi, opt.bisection_rel_tol);
  const double lower = std::max(p_min, eta);
  search.result().threshold_price = lower;
  double p = std::max(lower, 1e-6);
  double prev = search.eval(make(p), {p}).revenue;
  int falling = 0;
  for (int k = 0; k < 400 && falling < 5; ++k) {
    p *= 2.0;
    const double r = search.eval(make(p), {p}).revenue;
    falling = r < prev ? falling + 1 : 0;
    prev = r;
  }
  search_line(search, make, lower, p);
  return search.finish();
}

// Two-tier: per-cap tier-1 allocations are cached; fees are then cheap to evaluate.
struct TierCache {
  std::vector<double> utility;  // tier-1 utility per user
  std::vector<double> total_y;  // tier-1 total 3G per user
  std::vector<Eigen::VectorXd> y;
};

class TwoTierEvaluator {
 public:
  explicit TwoTierEvaluator(const Market& m) : m_(m) {
    const auto users = m.users();
    full_y_.reserve(users.size());
    for (const auto& u : users) {
      full_y_.push_back(u.expected_3g(u.demand()));
      full_total_.push_back(full_y_.back().sum());
      full_utility_.push_back(u.full_utility());
    }
  }

  const TierCache& cache(double cap) {
    auto it = caches_.find(cap);
    if (it != caches_.end()) return it->second;
    TierCache c;
    const auto users = m_.users();
    for (std::size_t i = 0; i < users.size(); ++i) {
      Eigen::VectorXd x = water_fill(users[i], cap);
      c.utility.push_back(users[i].utility(x));
      c.y.push_back(users[i].expected_3g(x));
      c.total_y.push_back(c.y.back().sum());
    }
    if (caches_.size() > 64) caches_.clear();
    return caches_.emplace(cap, std::move(c)).first->second;
  }

  /// Revenue only (cheap); decisions mirror respond_two_tier.
  double revenue(const TierCache& c, double fee1, double fee2, double cap) const {
    const auto users = m_.users();
    const double eta = m_.config().eta;
    double r = 0.0;
    for (std::size_t i = 0; i < users.size(); ++i) {
      const auto [tier, pay, total] = decide(c, i, fee1, fee2, cap);
      if (tier) r += users[i].weight() * (pay - eta * total);
    }
    return r;
  }

  double peak_load(const TierCache& c, double fee1, double fee2, double cap) const {
    const auto users = m_.users();
    const int T = m_.config().num_slots, S = m_.config().num_cells;
    Eigen::MatrixXd load = Eigen::MatrixXd::Zero(T, S);
    for (std::size_t i = 0; i < users.size(); ++i) {
      const int tier = std::get<0>(decide(c, i, fee1, fee2, cap));
      if (!tier) continue;
      const Eigen::VectorXd& y = tier == 1 ? c.y[i] : full_y_[i];
      for (int t = 0; t < T; ++t) load(t, users[i].cell_path()(t)) += users[i].weight() * y(t);
    }
    return load.maxCoeff();
  }

 private:
  std::tuple<int, double, double> decide(const TierCache& c, std::size_t i, double fee1, double fee2,
                                         double cap) const {
    const double pay1 = c.total_y[i] > 0.0 ? fee1 : 0.0;
    const double v1 = c.utility[i] - pay1;
    double v2 = -std::numeric_limits<double>::infinity(), pay2 = 0.0;
    if (m_.users()[i].demand().dot(m_.users()[i].kappa()) > cap) {
      pay2 = full_total_[i] > cap ? fee2 : (full_total_[i] > 0.0 ? fee1 : 0.0);
      v2 = full_utility_[i] - pay2;
    }
    if (!(std::max(v1, v2) > 0.0)) return {0, 0.0, 0.0};
    if (v1 >= v2) return {1, pay1, c.total_y[i]};
    return {2, pay2, full_total_[i]};
  }

  const Market& m_;
  std::vector<Eigen::VectorXd> full_y_;
  std::vector<double> full_total_, full_utility_;
  std::map<double, TierCache> caches_;
};

EquilibriumResult solve_two_tier_numeric(const Market& m, const SolverOptions& opt) {
  const EquilibriumResult flat = solve_flat_numeric(m, opt);
  Search search(m, opt);
  TwoTierEvaluator ev(m);
  const double cap_ok = m.capacity();
  double best = -std::numeric_limits<double>::infinity();
  std::array<double, 3> best_x{0.0, 0.0, 0.0};

  // Exact evaluation of a candidate that beats the incumbent on cheap revenue.
  auto consider = [&](double f1, double f2, double cap) {
    if (f1 < 0.0 || f2 < f1 || !(cap > 0.0)) return;
    const TierCache& c = ev.cache(cap);
    const double r = ev.revenue(c, f1, f2, cap);
    if (opt.keep_trace) search.result().trace.push_back({{f1, f2, cap}, r, false});
    if (!(r > 0.0) || r <= best) return;
    if (ev.peak_load(c, f1, f2, cap) > cap_ok) return;
    if (opt.keep_trace) search.result().trace.back().feasible = true;
    best = r;
    best_x = {f1, f2, cap};
  };

  std::vector<double> demand_3g;
  double g_max = 0.0;
  for (const auto& u : m.users()) {
    demand_3g.push_back(u.demand().dot(u.kappa()));
    g_max = std::max(g_max, u.full_utility());
  }
  std::sort(demand_3g.begin(), demand_3g.end());
  auto quantile = [&](double q) {
    const double pos = q * (demand_3g.size() - 1);
    return demand_3g[static_cast<std::size_t>(std::lround(pos))];
  };
  const double q_lo = std::max(quantile(0.05), 1e-9), q_hi = std::max(quantile(0.995), 2e-9);

  if (flat.saturation != Saturation::infeasible) {
    const double f = std::get<FlatPricing>(flat.scheme).fee;
    consider(f, f, q_hi);
  }
  const int nc = std::max(opt.tier_cap_points, 1), n1 = std::max(opt.tier_fee1_points, 2),
            n2 = std::max(opt.tier_fee2_points, 2);
  for (int kc = 0; kc < nc; ++kc) {
    const double cap = nc == 1 ? q_hi : q_lo * std::pow(q_hi / q_lo, static_cast<double>(kc) / (nc - 1));
    const TierCache& c = ev.cache(cap);
    const double u1_max = *std::max_element(c.utility.begin(), c.utility.end());
    for (int k1 = 0; k1 < n1; ++k1) {
      const double f1 = u1_max * k1 / (n1 - 1);
      for (int k2 = 0; k2 < n2; ++k2) {
        const double f2 = g_max * k2 / (n2 - 1);
        if (f2 >= f1) consider(f1, f2, cap);
      }
    }
  }

  if (std::isfinite(best)) {
    std::array<double, 3> step = {std::max(best_x[0], g_max / n1) * 0.25,
                                  std::max(best_x[1], g_max / n2) * 0.25, best_x[2] * 0.25};
    for (int it = 0; it < opt.tier_refine_iterations; ++it) {
      const double before = best;
      for (int d = 0; d < 3; ++d) {
        for (double sign : {1.0, -1.0}) {
          std::array<double, 3> x = best_x;
          x[static_cast<std::size_t>(d)] += sign * step[static_cast<std::size_t>(d)];
          consider(x[0], x[1], x[2]);
        }
      }
      if (best <= before) {
        for (auto& s : step) s *= 0.5;
        if (step[0] < 1e-6 * std::max(best_x[0], 1e-12) && step[2] < 1e-6 * best_x[2]) break;
      }
    }
    const PricingScheme s = TwoTierPricing{best_x[0], best_x[1], best_x[2]};
    search.record(s, {best_x[0], best_x[1], best_x[2]}, m.evaluate(s));
  }
  search.result().threshold_price = flat.threshold_price;
  EquilibriumResult r = search.finish();
  r.multimodal = flat.multimodal;
  return r;
}

// Congestion: incremental re-evaluation when one (slot, cell) price moves.
class CongestionState {
 public:
  CongestionState(const Market& m, Eigen::MatrixXd price) : m_(m), price_(std::move(price)) {
    const auto users = m.users();
    const int T = m.config().num_slots, S = m.config().num_cells;
    members_.assign(static_cast<std::size_t>(T * S), {});
    for (std::size_t i = 0; i < users.size(); ++i) {
      for (int t = 0; t < T; ++t) {
        auto& v = members_[static_cast<std::size_t>(t * S + users[i].cell_path()(t))];
        if (v.empty() || v.back() != i) v.push_back(i);
      }
    }
    load_ = Eigen::MatrixXd::Zero(T, S);
    responses_.resize(users.size());
    for (std::size_t i = 0; i < users.size(); ++i) {
      responses_[i] = respond_congestion(users[i], price_);
      apply(i, responses_[i], 1.0);
    }
  }

  double revenue() const { return pay_ - m_.config().eta * y_; }
  bool fits() const { return load_.maxCoeff() <= m_.capacity(); }
  const Eigen::MatrixXd& price() const { return price_; }

  /// Sets one entry, returns the previous responses so the move can be undone.
  std::vector<std::pair<std::size_t, UserResponse>> set(int t, int s, double v) {
    const int S = m_.config().num_cells;
    price_(t, s) = v;
    std::vector<std::pair<std::size_t, UserResponse>> undo;
    for (std::size_t i : members_[static_cast<std::size_t>(t * S + s)]) {
      UserResponse fresh = respond_congestion(m_.users()[i], price_);
      apply(i, responses_[i], -1.0);
      apply(i, fresh, 1.0);
      undo.emplace_back(i, std::move(responses_[i]));
      responses_[i] = std::move(fresh);
    }
    return undo;
  }

  void revert(int t, int s, double v, std::vector<std::pair<std::size_t, UserResponse>>& undo) {
    price_(t, s) = v;
    for (auto& [i, old] : undo) {
      apply(i, responses_[i], -1.0);
      apply(i, old, 1.0);
      responses_[i] = std::move(old);
    }
  }

 private:
  void apply(std::size_t i, const UserResponse& r, double sign) {
    const UserModel& u = m_.users()[i];
    const double w = sign * u.weight();
    pay_ += w * r.payment;
    y_ += w * r.y.sum();
    for (int t = 0; t < r.y.size(); ++t) load_(t, u.cell_path()(t)) += w * r.y(t);
  }

  const Market& m_;
  Eigen::MatrixXd price_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<UserResponse> responses_;
  Eigen::MatrixXd load_;
  double pay_ = 0.0, y_ = 0.0;
};

EquilibriumResult solve_congestion_numeric(const Market& m, const SolverOptions& opt) {
  const EquilibriumResult vol = solve_volume_numeric(m, opt);
  Search search(m, opt);
  search.result().threshold_price = vol.threshold_price;
  if (vol.saturation == Saturation::infeasible) {
    search.result().note = "volume reference is infeasible";
    return search.finish();
  }
  const int T = m.config().num_slots, S = m.config().num_cells;
  const double p_v = std::get<VolumePricing>(vol.scheme).unit_price;
  const Eigen::MatrixXd ind = load_indicator(vol.outcome.cell_load);
  auto make = [&](double base, double beta) -> PricingScheme {
    return CongestionPricing{congestion_matrix(base, beta, ind)};
  };
  auto value = [&](double base, double beta) {
    return search.objective(search.eval(make(base, beta), {base, beta}));
  };

  double base = p_v, beta = 0.0;
  double best = value(base, beta);
  const double beta_span = 1.0 / std::max(ind.maxCoeff(), 1e-3);
  for (int round = 0; round < opt.congestion_rounds; ++round) {
    const double before = best;
    const ScalarProbe b = golden_section_max([&](double x) { return value(base, x); },
                                             -beta_span, 2.0 * beta_span, 1e-4, nullptr, 1.0);
    if (b.value > best) {
      best = b.value;
      beta = b.x;
    }
    const ScalarProbe p = golden_section_max([&](double x) { return value(x, beta); }, 0.5 * base,
                                             2.0 * base, opt.golden_rel_tol);
    if (p.value > best) {
      best = p.value;
      base = p.x;
    }
    if (!(best > before + opt.congestion_rel_tol * std::abs(before))) break;
  }

  if (opt.congestion_local_pass && search.have_best()) {
    CongestionState state(m, std::get<CongestionPricing>(search.result().scheme).unit_price);
    double step = opt.congestion_step;
    double current = state.revenue();
    for (int pass = 0; pass < opt.congestion_max_passes; ++pass) {
      const double start = current;
      for (int t = 0; t < T; ++t) {
        for (int s = 0; s < S; ++s) {
          const double old = state.price()(t, s);
          for (double factor : {1.0 + step, 1.0 - step}) {
            auto undo = state.set(t, s, old * factor);
            const double r = state.revenue();
            if (r > current && state.fits()) {
              current = r;
              break;
            }
            state.revert(t, s, old, undo);
          }
        }
      }
      if (!(current > start + opt.congestion_rel_tol * std::abs(start))) {
        if (step < 0.004) break;
        step *= 0.5;
      }
    }
    const PricingScheme s = CongestionPricing{state.price()};
    search.record(s, {base, beta, -1.0}, m.evaluate(s));
  }
  EquilibriumResult r = search.finish();
  r.multimodal = vol.multimodal;
  return r;
}

}  // namespace

EquilibriumResult solve_numeric(const Market& m, SchemeFamily family, const SolverOptions& opt) {
  switch (family) {
    case SchemeFamily::flat: return solve_flat_numeric(m, opt);
    case SchemeFamily::volume: return solve_volume_numeric(m, opt);
    case SchemeFamily::two_tier: return solve_two_tier_numeric(m, opt);
    case SchemeFamily::congestion: return solve_congestion_numeric(m, opt);
  }
  throw ContractViolation("unknown scheme family");
}

}  // namespace offload
