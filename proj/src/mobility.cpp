#include "offload/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/tools/roots.hpp>

#include "offload/errors.hpp"

namespace offload {

void MobilityConfig::validate() const {
  if (num_cells < 1) throw ConfigError("mobility: num_cells must be >= 1");
  if (office_cells < 0 || residential_cells < 0 || office_cells + residential_cells != num_cells)
    throw ConfigError("mobility: office + residential cells must equal num_cells");
  if (visited_bs_distribution.empty()) throw ConfigError("mobility: visited-BS law is empty");
  double total = 0.0;
  for (const auto& [k, p] : visited_bs_distribution) {
    if (k < 1) throw ConfigError("mobility: visited-BS count must be >= 1");
    if (!(p >= 0.0)) throw ConfigError("mobility: negative visited-BS probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mobility: visited-BS law must sum to 1");
  if (cell_attraction.cols() != num_cells) throw ConfigError("mobility: attraction width != num_cells");
  if ((cell_attraction.array() < 0.0).any()) throw ConfigError("mobility: negative attraction");
  for (Eigen::Index t = 0; t < cell_attraction.rows(); ++t) {
    if (!(cell_attraction.row(t).sum() > 0.0))
      throw ConfigError("mobility: attraction row " + std::to_string(t) + " has no positive entry");
  }
}

std::map<int, double> geometric_visits(double mean, int max_count) {
  if (max_count < 1) throw ConfigError("visited-BS max must be >= 1");
  if (!(mean >= 1.0 && mean <= (max_count + 1) / 2.0))
    throw ConfigError("visited-BS mean must lie in [1, (max+1)/2]");
  auto law = [max_count](double q) {
    std::map<int, double> m;
    double total = 0.0;
    for (int k = 1; k <= max_count; ++k) total += m[k] = std::pow(1.0 - q, k - 1) * q;
    for (auto& [k, p] : m) p /= total;
    return m;
  };
  auto mean_of = [&](double q) {
    double s = 0.0;
    for (const auto& [k, p] : law(q)) s += k * p;
    return s;
  };
  if (mean >= (max_count + 1) / 2.0 - 1e-12) return law(1e-12);
  if (mean <= 1.0 + 1e-12) return {{1, 1.0}};
  boost::math::tools::eps_tolerance<double> tol(40);
  auto [lo, hi] = boost::math::tools::bisect([&](double q) { return mean_of(q) - mean; }, 1e-9,
                                             1.0 - 1e-12, tol);
  return law(0.5 * (lo + hi));
}

Eigen::VectorXd draw_cell_popularity(int num_cells, double spread, std::uint64_t seed) {
  if (!(spread >= 0.0)) throw ConfigError("popularity spread must be non-negative");
  Eigen::VectorXd pop = Eigen::VectorXd::Ones(num_cells);
  if (spread == 0.0) return pop;
  auto rng = substream(seed, streams::cells, 0);
  std::normal_distribution<double> z(-0.5 * spread * spread, spread);
  for (int s = 0; s < num_cells; ++s) pop(s) = std::exp(z(rng));
  return pop;
}

Eigen::MatrixXd build_cell_attraction(const DiurnalConfig& diurnal, int num_slots,
                                      int office_cells, int residential_cells,
                                      const Eigen::VectorXd& popularity) {
  const int S = office_cells + residential_cells;
  if (popularity.size() != S) throw ConfigError("popularity length != num_cells");
  const Eigen::VectorXd office = office_pattern(diurnal, num_slots);
  const Eigen::VectorXd home = residential_pattern(diurnal, num_slots);
  Eigen::MatrixXd a(num_slots, S);
  for (int s = 0; s < S; ++s) a.col(s) = popularity(s) * (s < office_cells ? office : home);
  return a;
}

Eigen::VectorXd network_usage_pattern(const Eigen::MatrixXd& a) { return a.rowwise().sum(); }

Eigen::MatrixXd occupancy_share(const Eigen::MatrixXd& a) {
  return a.array().colwise() / a.rowwise().sum().array();
}

void ContactModel::validate(int num_slots) const {
  if (deadline_grid.empty() || deadline_grid.front() != 0)
    throw ConfigError("contact grid must start at deadline 0");
  if (mean_contact.size() != deadline_grid.size())
    throw ConfigError("contact means must align with the deadline grid");
  for (std::size_t g = 0; g < deadline_grid.size(); ++g) {
    if (g > 0 && deadline_grid[g] <= deadline_grid[g - 1])
      throw ConfigError("deadline grid must be strictly increasing");
    if (!(mean_contact[g] >= 0.0 && mean_contact[g] <= 1.0))
      throw ConfigError("contact mean outside [0,1]");
    if (g > 0 && mean_contact[g] < mean_contact[g - 1])
      throw ConfigError("contact means must be non-decreasing in deadline");
  }
  if (!(heterogeneity >= 0.0 && heterogeneity <= 1.0))
    throw ConfigError("contact heterogeneity must lie in [0,1]");
  if (!(propensity_a > 0.0 && propensity_b > 0.0)) throw ConfigError("Beta shapes must be positive");
  if (!(home_boost >= 1.0)) throw ConfigError("home boost must be >= 1");
  if (home_slots < 0 || home_slots > num_slots) throw ConfigError("home window length out of range");
  if (home_start_slot < 0 || home_start_slot >= num_slots)
    throw ConfigError("home window start out of range");
}

Eigen::VectorXd home_miss_modulation(const ContactModel& m, int T) {
  Eigen::VectorXd f = Eigen::VectorXd::Ones(T);
  const int H = m.home_slots;
  if (H == 0 || H == T || m.home_boost == 1.0 || m.heterogeneity == 0.0) return f;
  const double away = (T - H / m.home_boost) / (T - H);
  f.setConstant(away);
  for (int k = 0; k < H; ++k) f((m.home_start_slot + k) % T) = 1.0 / m.home_boost;
  return f;
}

namespace {

int draw_index(const Eigen::VectorXd& weights, std::mt19937_64& rng) {
  std::discrete_distribution<int> d(weights.data(), weights.data() + weights.size());
  return d(rng);
}

double draw_beta(double a, double b, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x / (x + y);
}

}  // namespace

std::vector<Eigen::VectorXi> generate_cell_paths(const MobilityConfig& cfg, int n, int T,
                                                 std::uint64_t seed) {
  cfg.validate();
  if (cfg.cell_attraction.rows() != T) throw ConfigError("attraction rows != num_slots");
  std::vector<int> counts;
  std::vector<double> probs;
  for (const auto& [k, p] : cfg.visited_bs_distribution) {
    counts.push_back(k);
    probs.push_back(p);
  }
  std::vector<Eigen::VectorXd> rows(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) rows[static_cast<std::size_t>(t)] = cfg.cell_attraction.row(t).transpose();

  std::vector<int> slots(static_cast<std::size_t>(std::max(T - 1, 0)));
  std::iota(slots.begin(), slots.end(), 1);
  std::vector<Eigen::VectorXi> paths(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = substream(seed, streams::path, static_cast<std::uint64_t>(i));
    Eigen::VectorXi path(T);
    int cell = draw_index(rows[0], rng);
    std::discrete_distribution<std::size_t> visits(probs.begin(), probs.end());
    const int handovers = std::min(counts[visits(rng)] - 1, T - 1);
    std::vector<int> instants = slots;
    // Partial Fisher-Yates: first `handovers` entries are a uniform distinct sample.
    for (int k = 0; k < handovers; ++k) {
      std::uniform_int_distribution<int> pick(k, static_cast<int>(instants.size()) - 1);
      std::swap(instants[static_cast<std::size_t>(k)], instants[static_cast<std::size_t>(pick(rng))]);
    }
    std::sort(instants.begin(), instants.begin() + handovers);
    int next = 0;
    for (int t = 0; t < T; ++t) {
      if (next < handovers && instants[static_cast<std::size_t>(next)] == t) {
        cell = draw_index(rows[static_cast<std::size_t>(t)], rng);
        ++next;
      }
      path(t) = cell;
    }
    paths[static_cast<std::size_t>(i)] = std::move(path);
  }
  return paths;
}

std::vector<Eigen::MatrixXd> generate_contacts(const ContactModel& model, int n, int T,
                                               std::uint64_t seed, ContactDiagnostics* diag) {
  model.validate(T);
  const auto G = static_cast<Eigen::Index>(model.deadline_grid.size());
  const Eigen::VectorXd f = home_miss_modulation(model, T);
  const double a = model.propensity_a, b = model.propensity_b;
  const double mean_s = a / (a + b);
  Eigen::VectorXd base_miss(G);
  for (Eigen::Index g = 0; g < G; ++g) base_miss(g) = 1.0 - model.mean_contact[static_cast<std::size_t>(g)];

  long long clamped = 0;
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double r = 1.0;
    if (model.heterogeneity > 0.0) {
      auto rng = substream(seed, streams::contact, static_cast<std::uint64_t>(i));
      r = 1.0 + model.heterogeneity * (draw_beta(a, b, rng) / mean_s - 1.0);
    }
    Eigen::MatrixXd miss = r * base_miss * f.transpose();
    clamped += (miss.array() > 1.0).count() + (miss.array() < 0.0).count();
    out[static_cast<std::size_t>(i)] = (1.0 - miss.array().min(1.0).max(0.0)).matrix();
  }
  if (diag) diag->clamped += clamped;
  return out;
}

}  // namespace offload
