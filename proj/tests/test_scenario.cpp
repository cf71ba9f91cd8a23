#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "offload/errors.hpp"
#include "offload/population.hpp"
#include "offload/scenario.hpp"

using namespace offload;

namespace {

// Density x^-sigma / Z on (0, phi_max].
double quad_mean(const DemandDistribution& d) {
  boost::math::quadrature::tanh_sinh<double> q;
  const double z = q.integrate([&](double x) { return std::pow(x, -d.sigma); }, 0.0, d.phi_max);
  return q.integrate([&](double x) { return x * std::pow(x, -d.sigma) / z; }, 0.0, d.phi_max);
}

}  // namespace

TEST(ModelConfig, DefaultsValidate) { EXPECT_NO_THROW(ModelConfig{}.validate()); }

TEST(ModelConfig, RejectsBadFields) {
  auto bad = [](auto mutate) {
    ModelConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), ConfigError);
  };
  bad([](ModelConfig& c) { c.theta = 0.0; });
  bad([](ModelConfig& c) { c.theta = 1.0; });
  bad([](ModelConfig& c) { c.eta = -0.1; });
  bad([](ModelConfig& c) { c.capacity_per_cell = 0.0; });
  bad([](ModelConfig& c) { c.num_slots = 0; });
  bad([](ModelConfig& c) { c.max_deadline_slots = 24; });
}

TEST(DemandDistribution, NormalizerMatchesQuadrature) {
  const DemandDistribution d{0.57, 144.0};
  boost::math::quadrature::tanh_sinh<double> q;
  const double z = q.integrate([&](double x) { return std::pow(x, -d.sigma); }, 0.0, d.phi_max);
  EXPECT_NEAR(d.normalizer(), z, 1e-9 * z);
}

TEST(DemandDistribution, MeanMatchesQuadratureOracle) {
  for (double sigma : {0.1, 0.3, 0.57, 0.8}) {
    const DemandDistribution d{sigma, 7.5};
    EXPECT_NEAR(d.mean(), quad_mean(d), 1e-9 * d.mean()) << sigma;
  }
  EXPECT_NEAR((DemandDistribution{0.57, 1.0}.mean()), 0.3007, 5e-5);
}

TEST(DemandDistribution, QuantileInvertsCdf) {
  const DemandDistribution d{0.57, 144.0};
  for (double u : {1e-9, 0.01, 0.3, 0.5, 0.99, 1.0}) EXPECT_NEAR(d.cdf(d.quantile(u)), u, 1e-12);
  EXPECT_DOUBLE_EQ(d.quantile(1.0), d.phi_max);
  EXPECT_THROW(d.quantile(0.0), DomainError);
}

TEST(DemandDistribution, RejectsInvalidParameters) {
  EXPECT_THROW((DemandDistribution{1.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((DemandDistribution{0.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((DemandDistribution{0.5, -1.0}.validate()), ConfigError);
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_demands(DemandDistribution{1.5, 1.0}, 10, rng), ConfigError);
  EXPECT_THROW(sample_demands(DemandDistribution{0.5, 1.0}, 0, rng), ConfigError);
}

TEST(DemandDistribution, MonthlyCalibrationGivesDailyMean) {
  const double daily = monthly_to_daily(1300.0);
  EXPECT_NEAR(daily, 43.3, 0.05);
  EXPECT_NEAR(daily_to_monthly(daily), 1300.0, 1e-9);
  const auto d = DemandDistribution::with_mean(0.57, daily);
  EXPECT_NEAR(d.mean(), daily, 1e-12);
}

TEST(DemandSampler, MeanAndKolmogorovSmirnovAtOneMillion) {
  const DemandDistribution d{0.57, 144.0};
  std::mt19937_64 rng(42);
  auto s = sample_demands(d, 1'000'000, rng);
  double sum = 0.0;
  for (double v : s) {
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, d.phi_max);
    sum += v;
  }
  EXPECT_NEAR(sum / s.size(), d.mean(), 0.01 * d.mean());
  std::sort(s.begin(), s.end());
  double ks = 0.0;
  const double n = static_cast<double>(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = d.cdf(s[k]);
    ks = std::max({ks, std::abs((k + 1) / n - f), std::abs(k / n - f)});
  }
  EXPECT_LT(ks, 0.01);
}

TEST(DemandSampler, StratifiedCoversEveryQuantileBin) {
  const DemandDistribution d{0.57, 10.0};
  std::mt19937_64 rng(3);
  const int n = 1000;
  auto s = sample_demands_stratified(d, n, rng);
  std::vector<int> bins(n, 0);
  for (double v : s) bins[std::min(n - 1, static_cast<int>(d.cdf(v) * n))]++;
  EXPECT_TRUE(std::all_of(bins.begin(), bins.end(), [](int b) { return b == 1; }));
}

TEST(TemporalWeights, Examples) {
  const auto w = build_temporal_weights(Eigen::Vector2d(700, 300));
  EXPECT_DOUBLE_EQ(w(0), 0.7);
  EXPECT_DOUBLE_EQ(w(1), 0.3);
  const auto u = build_temporal_weights(Eigen::VectorXd::Ones(24));
  for (int t = 0; t < 24; ++t) EXPECT_DOUBLE_EQ(u(t), 1.0 / 24);
  EXPECT_THROW(build_temporal_weights(Eigen::VectorXd::Zero(3)), ConfigError);
  EXPECT_THROW(build_temporal_weights(Eigen::Vector2d(1, -1)), ConfigError);
  EXPECT_THROW(build_temporal_weights(Eigen::VectorXd()), ConfigError);
}

TEST(TemporalWeights, OfficePatternPeaksInsideBusinessHours) {
  const DiurnalConfig cfg;
  const auto w = build_temporal_weights(office_pattern(cfg, 24));
  Eigen::Index peak = 0;
  w.maxCoeff(&peak);
  EXPECT_GE(peak, 8);
  EXPECT_LT(peak, 20);
  EXPECT_NEAR(w.sum(), 1.0, 1e-12);
  // Slots are sampled at mid-hour, so the continuous peak ratio is an upper bound.
  EXPECT_LE(w.maxCoeff() / w.minCoeff(), cfg.office_peak_to_trough + 1e-12);
  EXPECT_GT(w.maxCoeff() / w.minCoeff(), 0.95 * cfg.office_peak_to_trough);
  const auto r = residential_pattern(cfg, 24);
  r.maxCoeff(&peak);
  EXPECT_TRUE(peak == 20 || peak == 21) << peak;
}

TEST(Willingness, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(build_willingness(Eigen::VectorXd::Constant(1, 0.25), 0.5, 1.0)(0), 0.5);
  EXPECT_NEAR(build_willingness(Eigen::VectorXd::Constant(1, 0.04), 0.5, 0.5)(0), 0.1, 1e-15);
  std::mt19937_64 a(9), b(9);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.25);
  const auto ga = build_willingness(w, 0.5, a), gb = build_willingness(w, 0.5, b);
  EXPECT_EQ(ga, gb);
  const double nu = ga(0) / std::sqrt(0.25);
  EXPECT_GT(nu, 0.0);
  EXPECT_LT(nu, 1.0);
  for (int t = 1; t < 4; ++t) EXPECT_DOUBLE_EQ(ga(t), ga(0));
}

TEST(DelayProfile, TableScenarios) {
  const ClassMix mix;
  const auto lng = build_delay_profile("long", mix);
  EXPECT_NEAR(lng.shares.at(120), 0.725, 1e-12);
  EXPECT_NEAR(lng.shares.at(360), 0.209, 1e-12);
  EXPECT_NEAR(lng.shares.at(0), 0.066, 1e-12);
  const auto zero = build_delay_profile("zero", mix);
  ASSERT_EQ(zero.shares.size(), 1u);
  EXPECT_DOUBLE_EQ(zero.shares.at(0), 1.0);
  ClassMix video_only;
  video_only.share = {1.0, 0.0, 0.0, 0.0};
  const auto single = build_delay_profile("medium", video_only);
  EXPECT_DOUBLE_EQ(single.shares.at(30), 1.0);
  EXPECT_THROW(build_delay_profile("forever", mix), ConfigError);
  for (const char* s : {"zero", "short", "medium", "long"}) EXPECT_NO_THROW(build_delay_profile(s, mix).validate(360));
}

TEST(DelayProfile, ValidationAndGrid) {
  DelayProfile p{{{0, 0.5}, {60, 0.6}}};
  EXPECT_THROW(p.validate(360), ConfigError);
  p.shares[60] = 0.5;
  EXPECT_NO_THROW(p.validate(360));
  EXPECT_THROW(p.validate(30), ConfigError);
  const auto g = p.on_grid(default_deadline_grid());
  EXPECT_DOUBLE_EQ(g(0), 0.5);
  EXPECT_DOUBLE_EQ(g(3), 0.5);
  EXPECT_THROW((DelayProfile{{{45, 1.0}}}.on_grid(default_deadline_grid())), ConfigError);
}

TEST(DelayProfile, BlendIsPortionWeighted) {
  const ClassMix mix;
  const auto b = blend_delay_profiles({{"zero", 0.5}, {"long", 0.5}}, mix);
  EXPECT_NEAR(b.shares.at(0), 0.5 + 0.5 * 0.066, 1e-12);
  EXPECT_NEAR(b.shares.at(120), 0.5 * 0.725, 1e-12);
  EXPECT_NO_THROW(b.validate(360));
}

TEST(Substream, DeterministicAndDistinct) {
  auto a = substream(7, 1, 3), b = substream(7, 1, 3), c = substream(7, 1, 4), d = substream(7, 2, 3);
  const auto va = a();
  EXPECT_EQ(va, b());
  EXPECT_NE(va, c());
  EXPECT_NE(va, d());
}

TEST(Population, HundredThousandProfilesPassValidation) {
  ScenarioSpec spec;
  spec.model.num_cells = 8;
  spec.model.users_per_cell = 12'500;
  spec.delay_portions = {{"long", 1.0}};
  const Population pop = build_population(spec);
  ASSERT_EQ(pop.users.size(), 100'000u);
  std::size_t violations = 0;
  for (const auto& u : pop.users) violations += validate_profile(u, pop.config, pop.deadline_grid).size();
  EXPECT_EQ(violations, 0u);
  const auto& u = pop.users[17];
  EXPECT_NEAR(u.demand().sum(), u.daily_demand, 1e-9 * u.daily_demand);
}

TEST(Population, BitReproducibleFromSeed) {
  ScenarioSpec spec;
  spec.model.num_cells = 4;
  spec.model.users_per_cell = 50;
  const Population a = build_population(spec), b = build_population(spec);
  for (std::size_t i = 0; i < a.users.size(); ++i) {
    EXPECT_EQ(a.users[i].daily_demand, b.users[i].daily_demand);
    EXPECT_EQ(a.users[i].willingness, b.users[i].willingness);
    EXPECT_EQ(a.users[i].wifi_contact, b.users[i].wifi_contact);
    EXPECT_EQ(a.users[i].cell_path, b.users[i].cell_path);
  }
  spec.model.rng_seed = 2;
  const Population c = build_population(spec);
  EXPECT_NE(a.users[0].daily_demand, c.users[0].daily_demand);
}

TEST(Population, ValidateProfileReportsBrokenInvariants) {
  ScenarioSpec spec;
  spec.model.num_cells = 2;
  spec.model.users_per_cell = 2;
  Population pop = build_population(spec);
  UserProfile u = pop.users[0];
  u.temporal_weight(0) += 0.1;
  u.wifi_contact(1, 3) = u.wifi_contact(0, 3) - 0.01;
  u.cell_path(2) = 5;
  EXPECT_GE(validate_profile(u, pop.config, pop.deadline_grid).size(), 3u);
}
