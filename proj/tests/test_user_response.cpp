#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "offload/errors.hpp"
#include "offload/user_response.hpp"
#include "test_support.hpp"

using namespace offload;
using testing_support::make_config;
using testing_support::make_user;
using testing_support::random_user;

namespace {

const std::vector<int> kGrid01 = {0, 60};  // on-the-spot and a one-slot deadline

UserModel single_slot(double phi, double gamma, double kappa) {
  Eigen::MatrixXd e(1, 1);
  e << 1.0 - kappa;
  const auto u = make_user(Eigen::VectorXd::Constant(1, phi), Eigen::VectorXd::Constant(1, gamma),
                           DelayProfile{{{0, 1.0}}}, e);
  return UserModel(u, make_config(1), {0});
}

double volume_net(const UserModel& u, const Eigen::VectorXd& x, double p) {
  return u.utility(x) - p * u.expected_3g(x).sum();
}

}  // namespace

TEST(ExpectedThreeG, NoOffloadingAndFullOffloading) {
  const Eigen::VectorXd x = Eigen::Vector3d(1, 2, 3);
  const auto none = make_user(x, Eigen::Vector3d::Ones(), DelayProfile{{{0, 1.0}}}, Eigen::MatrixXd::Zero(2, 3));
  EXPECT_EQ(expected_3g(x, none, make_config(3), kGrid01), x);
  Eigen::MatrixXd e(2, 3);
  e << 0.3, 0.3, 0.3, 1, 1, 1;
  const auto full = make_user(x, Eigen::Vector3d::Ones(), DelayProfile{{{60, 1.0}}}, e);
  EXPECT_TRUE(expected_3g(x, full, make_config(3), kGrid01).isZero());
}

TEST(ExpectedThreeG, HomogeneousMixRatio) {
  const int T = 4;
  Eigen::MatrixXd e(2, T);
  e.row(0).setConstant(0.5);
  e.row(1).setConstant(0.9);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(T, 2.5);
  const auto u = make_user(x, Eigen::VectorXd::Ones(T), DelayProfile{{{0, 0.3}, {60, 0.7}}}, e);
  const auto y = expected_3g(x, u, make_config(T), kGrid01);
  EXPECT_NEAR(y.sum() / x.sum(), 0.3 * 0.5 + 0.7 * 0.1, 1e-15);
  const UserModel m(u, make_config(T), kGrid01);
  EXPECT_NEAR(y.sum(), m.kappa().dot(x), 1e-12);
}

TEST(ExpectedThreeG, DeferredTrafficWrapsPastMidnight) {
  const int T = 3;
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, T);
  const auto u = make_user(Eigen::Vector3d(1, 2, 4), Eigen::Vector3d::Ones(), DelayProfile{{{60, 1.0}}}, e);
  const auto y = expected_3g(Eigen::Vector3d(1, 2, 4), u, make_config(T), kGrid01);
  EXPECT_EQ(y, Eigen::Vector3d(4, 1, 2));
}

TEST(RespondFlat, HomogeneousUserExample) {
  const int T = 4;
  const Eigen::VectorXd w = Eigen::Vector4d(0.1, 0.2, 0.3, 0.4);
  const Eigen::VectorXd gamma = build_willingness(w, 0.5, 1.0);
  const auto u = make_user(w, gamma, DelayProfile{{{0, 1.0}}}, Eigen::MatrixXd::Constant(1, T, 0.3));
  const UserModel m(u, make_config(T), {0});
  const auto r = respond_flat(m, 0.9);
  EXPECT_TRUE(r.subscribed);
  EXPECT_NEAR(r.net_utility, 0.1, 1e-12);
  EXPECT_EQ(r.x, m.demand());
  EXPECT_TRUE(respond_flat(m, 0.0).subscribed);
  const auto off = respond_flat(m, 1.0);
  EXPECT_FALSE(off.subscribed);
  EXPECT_TRUE(off.x.isZero());
  EXPECT_EQ(off.payment, 0.0);
  EXPECT_EQ(off.net_utility, 0.0);
  EXPECT_THROW(respond_flat(m, -1.0), ContractViolation);
}

TEST(RespondVolume, ClosedFormExamples) {
  EXPECT_NEAR(respond_volume(single_slot(2.0, 1.0, 1.0), 0.5).x(0), 1.0, 1e-15);
  EXPECT_NEAR(respond_volume(single_slot(0.8, 1.0, 1.0), 0.5).x(0), 0.8, 1e-15);
  const auto free = respond_volume(single_slot(3.0, 1.0, 1.0), 0.0);
  EXPECT_EQ(free.x(0), 3.0);
  EXPECT_EQ(free.payment, 0.0);
  EXPECT_EQ(respond_volume(single_slot(3.0, 1.0, 0.0), 5.0).x(0), 3.0);  // no 3G use: free traffic
}

TEST(RespondVolume, HomogeneousModeMatchesScaledOptimum) {
  const int T = 5;
  const double theta = 0.5, kappa = 0.4, Phi = 30.0;
  const Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(T, 1, 5) / 15.0;
  const auto u = make_user(Phi * w, build_willingness(w, theta, 1.0), DelayProfile{{{0, 1.0}}},
                           Eigen::MatrixXd::Constant(1, T, 1.0 - kappa));
  const UserModel m(u, make_config(T), {0});
  for (double p : {0.01, 0.1, 0.5, 2.0}) {
    const double cap = std::min(Phi, std::pow(theta / (p * kappa), 1.0 / (1.0 - theta)));
    const auto r = respond_volume(m, p);
    for (int t = 0; t < T; ++t) EXPECT_NEAR(r.x(t), w(t) * cap, 1e-12 * Phi) << p;
  }
}

TEST(RespondVolume, BeatsRandomPerturbations) {
  std::mt19937_64 rng(21);
  const int T = 24, S = 3;
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const UserModel m(random_user(rng, T, S), make_config(T, S), default_deadline_grid());
    const double p = 0.02 + 0.5 * std::generate_canonical<double, 53>(rng);
    const auto r = respond_volume(m, p);
    const double best = volume_net(m, r.x, p);
    EXPECT_NEAR(best, r.net_utility, 1e-12 * (1 + std::abs(best)));
    for (int k = 0; k < 1000; ++k) {
      Eigen::VectorXd x = r.x;
      const double scale = std::pow(10.0, -3.0 * std::generate_canonical<double, 53>(rng));
      for (int t = 0; t < T; ++t) x(t) = std::clamp(x(t) + scale * m.demand()(t) * n(rng), 0.0, m.demand()(t));
      ASSERT_LE(volume_net(m, x, p), best + 1e-9) << "user " << i << " trial " << k;
    }
  }
}

TEST(RespondVolume, MatchesPerSlotBruteForceGrid) {
  std::mt19937_64 rng(8);
  const int T = 24, S = 2, G = 10'000;
  for (int i = 0; i < 100; ++i) {
    const UserModel m(random_user(rng, T, S), make_config(T, S), default_deadline_grid());
    const double p = 0.02 + std::generate_canonical<double, 53>(rng);
    const auto r = respond_volume(m, p);
    for (int t = 0; t < T; ++t) {
      const double phi = m.demand()(t), g = m.willingness()(t), k = m.kappa()(t);
      double best_x = 0.0, best_v = -1.0;
      for (int j = 0; j <= G; ++j) {
        const double x = phi * j / G;
        const double v = g * std::sqrt(x) - p * k * x;
        if (v > best_v) {
          best_v = v;
          best_x = x;
        }
      }
      EXPECT_NEAR(r.x(t), best_x, phi / G + 1e-12) << "user " << i << " slot " << t;
    }
  }
}

TEST(RespondVolume, HigherPriceNeverRaisesTraffic) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const UserModel m(random_user(rng, 24, 2), make_config(24, 2), default_deadline_grid());
    Eigen::VectorXd prev = respond_volume(m, 0.0).x;
    for (double p = 0.01; p < 3.0; p *= 1.5) {
      const auto x = respond_volume(m, p).x;
      EXPECT_TRUE((x.array() <= prev.array()).all());
      prev = x;
    }
  }
}

TEST(RespondTwoTier, SingleSlotCapBinds) {
  const auto m = single_slot(4.0, 1.0, 0.5);
  const auto r = respond_two_tier(m, 0.3, 5.0, 1.0);
  EXPECT_EQ(r.tier, 1);
  EXPECT_NEAR(r.x(0), 2.0, 1e-8);
  EXPECT_NEAR(r.net_utility, std::sqrt(2.0) - 0.3, 1e-8);
}

TEST(RespondTwoTier, SlackCapPicksFeeOne) {
  const auto m = single_slot(4.0, 1.0, 0.5);
  const auto r = respond_two_tier(m, 1.0, 1.5, 10.0);
  EXPECT_EQ(r.tier, 1);
  EXPECT_EQ(r.x(0), 4.0);
  EXPECT_EQ(r.payment, 1.0);
}

TEST(RespondTwoTier, EqualFeesCollapseToFlat) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 200; ++i) {
    const UserModel m(random_user(rng, 24, 2), make_config(24, 2), default_deadline_grid());
    const double fee = 3.0 * std::generate_canonical<double, 53>(rng);
    const double cap = 20.0 * std::generate_canonical<double, 53>(rng) + 1e-3;
    const auto a = respond_two_tier(m, fee, fee, cap), b = respond_flat(m, fee);
    EXPECT_EQ(a.subscribed, b.subscribed);
    if (b.subscribed) {
      EXPECT_GE(a.net_utility, b.net_utility - 1e-12);
    }
  }
}

TEST(WaterFill, RespectsCapAndMatchesTwoSlotBruteForce) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Vector2d phi(5 * u(rng), 5 * u(rng)), gamma(u(rng), u(rng));
    Eigen::MatrixXd e(1, 2);
    e << 1 - u(rng), 1 - u(rng);
    const auto prof = make_user(phi, gamma, DelayProfile{{{0, 1.0}}}, e);
    const UserModel m(prof, make_config(2), {0});
    const Eigen::Vector2d k = m.kappa();
    const double cap = k.dot(phi) * u(rng);
    const Eigen::VectorXd x = m.demand().dot(k) <= cap ? m.demand() : water_fill(m, cap);
    ASSERT_LE(k.dot(x), cap * (1 + 1e-6));
    // Oracle: the budget binds, so scan x0 and give the rest to slot 1.
    const int G = 200'000;
    const double x0_max = std::min(phi(0), cap / k(0));
    double best = -1.0, bx0 = 0.0, bx1 = 0.0;
    for (int j = 0; j <= G; ++j) {
      const double x0 = x0_max * j / G;
      const double x1 = std::min(phi(1), (cap - k(0) * x0) / k(1));
      const double v = gamma(0) * std::sqrt(x0) + gamma(1) * std::sqrt(std::max(0.0, x1));
      if (v > best) {
        best = v;
        bx0 = x0;
        bx1 = x1;
      }
    }
    EXPECT_NEAR(m.utility(x), best, 1e-3);
    EXPECT_NEAR(x(0), bx0, 1e-3 * (1 + bx0));
    EXPECT_NEAR(x(1), bx1, 1e-3 * (1 + bx1));
  }
}

TEST(RespondCongestion, ConstantMatrixEqualsVolume) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const UserModel m(random_user(rng, 24, 3), make_config(24, 3), default_deadline_grid());
    const double p = std::generate_canonical<double, 53>(rng);
    const auto a = respond_congestion(m, Eigen::MatrixXd::Constant(24, 3, p)), b = respond_volume(m, p);
    EXPECT_TRUE(a.x.isApprox(b.x, 1e-14));
    EXPECT_TRUE(a.y.isApprox(b.y, 1e-14));
    EXPECT_NEAR(a.payment, b.payment, 1e-12 * (1 + b.payment));
  }
}

TEST(RespondCongestion, OnTheSpotEffectivePrice) {
  std::mt19937_64 rng(6);
  auto prof = random_user(rng, 24, 3);
  prof.delay_profile = DelayProfile{{{0, 1.0}}};
  const UserModel m(prof, make_config(24, 3), default_deadline_grid());
  Eigen::MatrixXd price(24, 3);
  for (int k = 0; k < price.size(); ++k) price.data()[k] = std::generate_canonical<double, 53>(rng);
  const auto eff = m.effective_price(price);
  for (int t = 0; t < 24; ++t)
    EXPECT_NEAR(eff(t), (1 - prof.wifi_contact(0, t)) * price(t, prof.cell_path(t)), 1e-15);
}

TEST(RespondCongestion, DeferredTrafficPaysTransmissionSlotPrice) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2, 2);
  const auto prof = make_user(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1), DelayProfile{{{60, 1.0}}}, e);
  const UserModel m(prof, make_config(2), kGrid01);
  Eigen::MatrixXd price(2, 1);
  price << 1, 2;
  EXPECT_DOUBLE_EQ(m.effective_price(price)(0), 2.0);
  EXPECT_DOUBLE_EQ(m.effective_price(price)(1), 1.0);
  const auto r = respond_congestion(m, price);
  EXPECT_NEAR(r.payment, price(1, 0) * r.x(0) + price(0, 0) * r.x(1), 1e-15);
}

TEST(Disutility, ExtremesOfTheFactor) {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 100; ++i) {
    auto prof = random_user(rng, 24, 2);
    prof.delay_profile = build_delay_profile("long", ClassMix{});
    const UserModel m(prof, make_config(24, 2), default_deadline_grid());
    const double p = 0.05 + std::generate_canonical<double, 53>(rng);
    EXPECT_TRUE(respond_with_disutility(m, p, 0.0).adopts_delayed);
    const auto none = respond_with_disutility(m, p, 1.0);
    EXPECT_FALSE(none.adopts_delayed);
    EXPECT_GT(none.net_utility, 0.0);
    const auto a = respond_with_disutility(m, p, 0.0), b = respond_volume(m, p);
    EXPECT_NEAR(a.net_utility, b.net_utility, 1e-12 * (1 + std::abs(b.net_utility)));
  }
  EXPECT_THROW(respond_with_disutility(single_slot(1, 1, 1), 1.0, 1.5), ContractViolation);
}

TEST(UserResponse, InvariantsAcrossSchemes) {
  std::mt19937_64 rng(77);
  const int T = 24, S = 3;
  for (int i = 0; i < 100; ++i) {
    const UserModel m(random_user(rng, T, S), make_config(T, S), default_deadline_grid());
    Eigen::MatrixXd price(T, S);
    for (int k = 0; k < price.size(); ++k) price.data()[k] = 0.3 * std::generate_canonical<double, 53>(rng);
    for (const PricingScheme& s : {PricingScheme{FlatPricing{2.0}}, PricingScheme{TwoTierPricing{0.5, 2.0, 3.0}},
                                   PricingScheme{VolumePricing{0.2}}, PricingScheme{CongestionPricing{price}}}) {
      const auto r = respond(m, s);
      EXPECT_TRUE((r.x.array() >= 0.0).all() && (r.x.array() <= m.demand().array() + 1e-12).all());
      EXPECT_TRUE((r.y.array() >= 0.0).all());
      EXPECT_LE(r.y.sum(), r.x.sum() + 1e-12);
      if (!r.subscribed) {
        EXPECT_TRUE(r.x.isZero());
        EXPECT_EQ(r.payment, 0.0);
        EXPECT_EQ(r.net_utility, 0.0);
      } else {
        EXPECT_GE(r.net_utility, -1e-12);
      }
    }
  }
}

TEST(RealizeThreeG, MonteCarloMeanMatchesExpectation) {
  std::mt19937_64 rng(3);
  const auto prof = random_user(rng, 24, 2);
  const auto cfg = make_config(24, 2);
  const Eigen::VectorXd x = prof.demand();
  const auto expect = expected_3g(x, prof, cfg, default_deadline_grid());
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(24);
  const int draws = 20'000;
  for (int k = 0; k < draws; ++k) acc += realize_3g(x, prof, cfg, default_deadline_grid(), rng);
  acc /= draws;
  EXPECT_NEAR(acc.sum(), expect.sum(), 0.01 * expect.sum());
}
