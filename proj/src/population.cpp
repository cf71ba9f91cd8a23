#include "offload/population.hpp"

#include <cmath>

#include "offload/errors.hpp"

namespace offload {

int ScenarioSpec::resolved_office_cells() const {
  if (office_cells >= 0) return office_cells;
  return static_cast<int>(std::lround(model.num_cells * 12.0 / 31.0));
}

void ScenarioSpec::validate() const {
  model.validate();
  demand.validate();
  diurnal.validate();
  contact.validate(model.num_slots);
  class_mix.validate();
  const int office = resolved_office_cells();
  if (office < 0 || office > model.num_cells) throw ConfigError("office_cells out of range");
  if (!(disutility_factor >= 0.0 && disutility_factor <= 1.0))
    throw ConfigError("disutility factor must lie in [0,1]");
  const int max_minutes = model.max_deadline_slots * model.slot_minutes();
  for (const auto& [name, w] : delay_portions) {
    build_delay_profile(name, class_mix).validate(max_minutes);
    if (!(w >= 0.0)) throw ConfigError("delay portion must be non-negative");
  }
}

double Population::total_weight() const {
  double s = 0.0;
  for (const auto& u : users) s += u.weight;
  return s;
}

void assign_delay_portions(Population& pop, const std::map<std::string, double>& portions,
                           const ClassMix& mix) {
  double total = 0.0;
  for (const auto& [name, w] : portions) total += w;
  if (portions.empty() || std::abs(total - 1.0) > 1e-9)
    throw ConfigError("delay portions must sum to 1");
  const auto n = pop.users.size();
  pop.delay_scenario.assign(n, {});
  std::size_t begin = 0;
  double cumulative = 0.0;
  // Canonical order so that a mix sweep moves mass monotonically.
  static const char* const kOrder[] = {"zero", "short", "medium", "long"};
  std::vector<std::pair<std::string, double>> ordered;
  for (const char* name : kOrder) {
    if (auto it = portions.find(name); it != portions.end()) ordered.emplace_back(*it);
  }
  if (ordered.size() != portions.size()) {
    for (const auto& [name, w] : portions) scenario_deadlines(name);
  }
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    cumulative += ordered[k].second;
    const std::size_t end =
        k + 1 == ordered.size() ? n : static_cast<std::size_t>(std::llround(cumulative * n));
    const DelayProfile profile = build_delay_profile(ordered[k].first, mix);
    for (std::size_t i = begin; i < std::max(begin, end); ++i) {
      pop.users[i].delay_profile = profile;
      pop.delay_scenario[i] = ordered[k].first;
    }
    begin = std::max(begin, end);
  }
}

void set_disutility(Population& pop, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) throw ConfigError("disutility factor must lie in [0,1]");
  for (auto& u : pop.users) u.disutility_factor = factor;
}

void scale_demand(Population& pop, double factor) {
  if (!(factor > 0.0)) throw ConfigError("demand scale must be positive");
  for (auto& u : pop.users) u.daily_demand *= factor;
}

Population build_population(const ScenarioSpec& spec) {
  spec.validate();
  const ModelConfig& cfg = spec.model;
  const int S = cfg.num_cells, T = cfg.num_slots, N = cfg.num_users();
  const std::uint64_t seed = cfg.rng_seed;

  MobilityConfig mob;
  mob.num_cells = S;
  mob.office_cells = spec.resolved_office_cells();
  mob.residential_cells = S - mob.office_cells;
  mob.visited_bs_distribution = spec.visited_bs_distribution.empty()
                                    ? geometric_visits(spec.visited_bs_mean, spec.visited_bs_max)
                                    : spec.visited_bs_distribution;
  mob.cell_attraction =
      build_cell_attraction(spec.diurnal, T, mob.office_cells, mob.residential_cells,
                            draw_cell_popularity(S, spec.popularity_spread, seed));

  Population pop;
  pop.config = cfg;
  pop.deadline_grid = spec.contact.deadline_grid;
  pop.cell_attraction = mob.cell_attraction;

  const Eigen::VectorXd w = build_temporal_weights(network_usage_pattern(mob.cell_attraction));
  auto demand_rng = substream(seed, streams::demand, 0);
  const std::vector<double> demands = spec.stratified_demand
                                          ? sample_demands_stratified(spec.demand, N, demand_rng)
                                          : sample_demands(spec.demand, N, demand_rng);
  auto paths = generate_cell_paths(mob, N, T, seed);
  auto contacts = generate_contacts(spec.contact, N, T, seed, &pop.contact_diagnostics);

  pop.users.resize(static_cast<std::size_t>(N));
  for (int i = 0; i < N; ++i) {
    auto& u = pop.users[static_cast<std::size_t>(i)];
    u.daily_demand = demands[static_cast<std::size_t>(i)];
    u.temporal_weight = w;
    if (spec.willingness == WillingnessMode::homogeneous) {
      u.willingness = build_willingness(w, cfg.theta, 1.0);
    } else {
      auto rng = substream(seed, streams::willingness, static_cast<std::uint64_t>(i));
      u.willingness = build_willingness(w, cfg.theta, rng);
    }
    u.wifi_contact = std::move(contacts[static_cast<std::size_t>(i)]);
    u.cell_path = std::move(paths[static_cast<std::size_t>(i)]);
    u.disutility_factor = spec.disutility_factor;
  }
  assign_delay_portions(pop, spec.delay_portions, spec.class_mix);
  return pop;
}

Population build_homogeneous_population(const HomogeneousMarketSpec& spec) {
  spec.demand.validate();
  const int T = spec.num_slots;
  if (!(spec.kappa_avg > 0.0 && spec.kappa_avg <= 1.0)) throw ConfigError("kappa_avg must lie in (0,1]");
  const double peak_share = spec.kappa_peak / spec.kappa_avg;
  if (!(peak_share >= 1.0 / T && peak_share <= 1.0))
    throw ConfigError("kappa_peak / kappa_avg must lie in [1/T, 1]");

  Eigen::VectorXd w(T);
  w(0) = peak_share;
  if (T > 1) w.tail(T - 1).setConstant((1.0 - peak_share) / (T - 1));

  Population pop;
  pop.config.num_cells = 1;
  pop.config.num_slots = T;
  pop.config.slot_duration_hours = 24.0 / T;
  pop.config.capacity_per_cell = spec.capacity;
  pop.config.theta = spec.theta;
  pop.config.eta = spec.eta;
  pop.config.max_deadline_slots = 0;
  pop.config.rng_seed = spec.seed;
  pop.deadline_grid = {0};

  std::vector<double> demands;
  double weight = 1.0;
  if (spec.quadrature) {
    const int m = spec.quadrature_nodes;
    demands.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) demands[static_cast<std::size_t>(k)] = spec.demand.quantile((k + 0.5) / m);
    weight = spec.n_hat / m;
  } else {
    auto rng = substream(spec.seed, streams::demand, 0);
    demands = sample_demands_stratified(spec.demand, static_cast<int>(std::lround(spec.n_hat)), rng);
  }
  pop.config.users_per_cell = static_cast<int>(demands.size());

  UserProfile proto;
  proto.temporal_weight = w;
  proto.willingness = build_willingness(w, spec.theta, 1.0);
  proto.delay_profile.shares = {{0, 1.0}};
  proto.wifi_contact = Eigen::MatrixXd::Constant(1, T, 1.0 - spec.kappa_avg);
  proto.cell_path = Eigen::VectorXi::Zero(T);
  proto.weight = weight;
  pop.users.assign(demands.size(), proto);
  for (std::size_t i = 0; i < demands.size(); ++i) pop.users[i].daily_demand = demands[i];
  pop.delay_scenario.assign(demands.size(), "zero");
  return pop;
}

}  // namespace offload
