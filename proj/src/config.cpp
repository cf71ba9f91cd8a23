#include "offload/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "offload/errors.hpp"
#include "offload/tabular.hpp"

namespace offload {

void apply_scale_preset(ScenarioSpec& spec, std::string_view preset) {
  if (preset == "full") {
    spec.model.num_cells = 31;
    spec.model.users_per_cell = 1000;
  } else if (preset == "desk") {
    spec.model.num_cells = 8;
    spec.model.users_per_cell = 200;
  } else {
    throw ConfigError("unknown scale preset '" + std::string(preset) + "' (expected full or desk)");
  }
  spec.office_cells = -1;
}

namespace {

const std::vector<std::string> kTopKeys = {"scale", "model", "demand", "diurnal", "mobility", "contact", "delay",
                                           "willingness", "disutility_factor", "stratified_demand",
                                           "saturation_ratio", "pricing", "schemes", "solver", "sweep"};

void check_keys(const YAML::Node& node, const std::string& where, const std::vector<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_model(const YAML::Node& n, ModelConfig& m) {
  check_keys(n, "model", {"num_cells", "users_per_cell", "num_slots", "slot_duration_hours", "capacity_per_cell",
                          "theta", "eta", "max_deadline_slots", "seed"});
  read(n, "num_cells", m.num_cells, "model");
  read(n, "users_per_cell", m.users_per_cell, "model");
  read(n, "num_slots", m.num_slots, "model");
  read(n, "slot_duration_hours", m.slot_duration_hours, "model");
  read(n, "capacity_per_cell", m.capacity_per_cell, "model");
  read(n, "theta", m.theta, "model");
  read(n, "eta", m.eta, "model");
  read(n, "max_deadline_slots", m.max_deadline_slots, "model");
  read(n, "seed", m.rng_seed, "model");
}

void read_demand(const YAML::Node& n, DemandDistribution& d) {
  check_keys(n, "demand", {"sigma", "mean", "phi_max"});
  if (n["mean"] && n["phi_max"]) throw ConfigError("demand: give either mean or phi_max, not both");
  double sigma = d.sigma;
  read(n, "sigma", sigma, "demand");
  if (n["mean"]) {
    d = DemandDistribution::with_mean(sigma, n["mean"].as<double>());
  } else {
    d.sigma = sigma;
    read(n, "phi_max", d.phi_max, "demand");
  }
}

void read_diurnal(const YAML::Node& n, DiurnalConfig& d) {
  check_keys(n, "diurnal", {"office_peak_slot", "residential_peak_slot", "office_peak_to_trough",
                            "residential_peak_to_trough", "office_open_slot", "office_close_slot"});
  read(n, "office_peak_slot", d.office_peak_slot, "diurnal");
  read(n, "residential_peak_slot", d.residential_peak_slot, "diurnal");
  read(n, "office_peak_to_trough", d.office_peak_to_trough, "diurnal");
  read(n, "residential_peak_to_trough", d.residential_peak_to_trough, "diurnal");
  read(n, "office_open_slot", d.office_open_slot, "diurnal");
  read(n, "office_close_slot", d.office_close_slot, "diurnal");
}

void read_mobility(const YAML::Node& n, ScenarioSpec& s) {
  check_keys(n, "mobility", {"office_cells", "popularity_spread", "visited_bs_mean", "visited_bs_max",
                             "visited_bs_distribution"});
  read(n, "office_cells", s.office_cells, "mobility");
  read(n, "popularity_spread", s.popularity_spread, "mobility");
  read(n, "visited_bs_mean", s.visited_bs_mean, "mobility");
  read(n, "visited_bs_max", s.visited_bs_max, "mobility");
  read(n, "visited_bs_distribution", s.visited_bs_distribution, "mobility");
}

void read_contact(const YAML::Node& n, ContactModel& c) {
  check_keys(n, "contact", {"deadline_grid", "mean_contact", "heterogeneity", "propensity_a", "propensity_b",
                            "home_boost", "home_start_slot", "home_slots"});
  read(n, "deadline_grid", c.deadline_grid, "contact");
  read(n, "mean_contact", c.mean_contact, "contact");
  read(n, "heterogeneity", c.heterogeneity, "contact");
  read(n, "propensity_a", c.propensity_a, "contact");
  read(n, "propensity_b", c.propensity_b, "contact");
  read(n, "home_boost", c.home_boost, "contact");
  read(n, "home_start_slot", c.home_start_slot, "contact");
  read(n, "home_slots", c.home_slots, "contact");
}

void read_delay(const YAML::Node& n, ScenarioSpec& s) {
  check_keys(n, "delay", {"scenario", "portions", "class_mix"});
  if (n["scenario"] && n["portions"]) throw ConfigError("delay: give either scenario or portions, not both");
  if (n["scenario"]) s.delay_portions = {{n["scenario"].as<std::string>(), 1.0}};
  read(n, "portions", s.delay_portions, "delay");
  if (n["class_mix"]) {
    const auto v = n["class_mix"].as<std::vector<double>>();
    if (v.size() != 4) throw ConfigError("delay.class_mix needs 4 shares (video, data, p2p, audio)");
    std::copy(v.begin(), v.end(), s.class_mix.share.begin());
  }
}

void read_solver(const YAML::Node& n, SolverOptions& o) {
  check_keys(n, "solver", {"grid_points", "golden_rel_tol", "bisection_rel_tol", "tier_fee1_points",
                           "tier_fee2_points", "tier_cap_points", "tier_refine_iterations", "congestion_local_pass",
                           "congestion_max_passes", "congestion_rel_tol", "congestion_step", "congestion_rounds",
                           "keep_trace"});
  read(n, "grid_points", o.grid_points, "solver");
  read(n, "golden_rel_tol", o.golden_rel_tol, "solver");
  read(n, "bisection_rel_tol", o.bisection_rel_tol, "solver");
  read(n, "tier_fee1_points", o.tier_fee1_points, "solver");
  read(n, "tier_fee2_points", o.tier_fee2_points, "solver");
  read(n, "tier_cap_points", o.tier_cap_points, "solver");
  read(n, "tier_refine_iterations", o.tier_refine_iterations, "solver");
  read(n, "congestion_local_pass", o.congestion_local_pass, "solver");
  read(n, "congestion_max_passes", o.congestion_max_passes, "solver");
  read(n, "congestion_rel_tol", o.congestion_rel_tol, "solver");
  read(n, "congestion_step", o.congestion_step, "solver");
  read(n, "congestion_rounds", o.congestion_rounds, "solver");
  read(n, "keep_trace", o.keep_trace, "solver");
}

std::vector<SchemeFamily> read_schemes(const YAML::Node& n, const std::string& where) {
  std::vector<SchemeFamily> out;
  for (const auto& s : n.as<std::vector<std::string>>()) out.push_back(parse_scheme_family(s));
  if (out.empty()) throw ConfigError(where + " must list at least one scheme");
  return out;
}

PricingScheme read_pricing(const YAML::Node& n, const std::filesystem::path& base_dir, const ModelConfig& model) {
  if (!n["scheme"]) throw ConfigError("pricing.scheme is required");
  const SchemeFamily f = parse_scheme_family(n["scheme"].as<std::string>());
  PricingScheme out;
  switch (f) {
    case SchemeFamily::flat:
      check_keys(n, "pricing", {"scheme", "fee"});
      out = FlatPricing{n["fee"].as<double>()};
      break;
    case SchemeFamily::two_tier:
      check_keys(n, "pricing", {"scheme", "fee1", "fee2", "cap1"});
      out = TwoTierPricing{n["fee1"].as<double>(), n["fee2"].as<double>(), n["cap1"].as<double>()};
      break;
    case SchemeFamily::volume:
      check_keys(n, "pricing", {"scheme", "unit_price"});
      out = VolumePricing{n["unit_price"].as<double>()};
      break;
    case SchemeFamily::congestion: {
      check_keys(n, "pricing", {"scheme", "unit_price", "matrix_file"});
      if (n["unit_price"] && n["matrix_file"])
        throw ConfigError("pricing: give either unit_price or matrix_file for congestion pricing");
      if (n["matrix_file"]) {
        std::filesystem::path p = n["matrix_file"].as<std::string>();
        if (p.is_relative()) p = base_dir / p;
        out = CongestionPricing{load_congestion_matrix(p, model.num_slots, model.num_cells)};
      } else if (n["unit_price"]) {
        out = CongestionPricing{Eigen::MatrixXd::Constant(model.num_slots, model.num_cells, n["unit_price"].as<double>())};
      } else {
        throw ConfigError("pricing: congestion pricing needs unit_price or matrix_file");
      }
      break;
    }
  }
  validate(out);
  return out;
}

SweepSpec read_sweep(const YAML::Node& n, const RunConfig& rc) {
  check_keys(n, "sweep", {"axis", "values", "baseline", "repetitions", "first_seed", "schemes"});
  SweepSpec s;
  s.scenario = rc.scenario;
  s.solver = rc.solver;
  s.saturation_ratio = rc.saturation_ratio;
  s.schemes = rc.schemes;
  if (!n["axis"] || !n["values"]) throw ConfigError("sweep needs axis and values");
  s.axis = parse_sweep_axis(n["axis"].as<std::string>());
  for (const auto& v : n["values"]) s.values.push_back(v.as<std::string>());
  read(n, "baseline", s.baseline, "sweep");
  read(n, "repetitions", s.repetitions, "sweep");
  read(n, "first_seed", s.first_seed, "sweep");
  if (n["schemes"]) s.schemes = read_schemes(n["schemes"], "sweep.schemes");
  s.validate();
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& yaml_text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed YAML: ") + e.what());
  }
  RunConfig rc;
  if (root.IsNull()) {
    rc.scenario.validate();
    return rc;
  }
  check_keys(root, "scenario config", kTopKeys);
  try {
    ScenarioSpec& s = rc.scenario;
    if (root["scale"]) apply_scale_preset(s, root["scale"].as<std::string>());
    if (root["model"]) read_model(root["model"], s.model);
    if (root["demand"]) read_demand(root["demand"], s.demand);
    if (root["diurnal"]) read_diurnal(root["diurnal"], s.diurnal);
    if (root["mobility"]) read_mobility(root["mobility"], s);
    if (root["contact"]) read_contact(root["contact"], s.contact);
    if (root["delay"]) read_delay(root["delay"], s);
    if (root["willingness"]) {
      const auto w = root["willingness"].as<std::string>();
      if (w == "heterogeneous") s.willingness = WillingnessMode::heterogeneous;
      else if (w == "homogeneous") s.willingness = WillingnessMode::homogeneous;
      else throw ConfigError("willingness must be heterogeneous or homogeneous");
    }
    read(root, "disutility_factor", s.disutility_factor, "scenario config");
    read(root, "stratified_demand", s.stratified_demand, "scenario config");
    read(root, "saturation_ratio", rc.saturation_ratio, "scenario config");
    if (rc.saturation_ratio < 0.0) throw ConfigError("saturation_ratio must be non-negative");
    if (root["solver"]) read_solver(root["solver"], rc.solver);
    if (root["schemes"]) rc.schemes = read_schemes(root["schemes"], "schemes");
    s.validate();
    if (root["pricing"]) rc.pricing = read_pricing(root["pricing"], base_dir, s.model);
    if (root["sweep"]) rc.sweep = read_sweep(root["sweep"], rc);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("bad value in scenario config: ") + e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

}  // namespace offload
