#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "criteria.hpp"
#include "offload/analytic.hpp"
#include "offload/equilibrium.hpp"
#include "offload/errors.hpp"
#include "oracles.hpp"

using namespace offload;

namespace {

AnalyticParams<double> example() {
  AnalyticParams<double> a;
  a.theta = 0.5;
  a.sigma = 0.5;
  a.phi_max = 1.0;
  a.n_hat = 1000;
  a.kappa_avg = 0.5;
  a.kappa_peak = 0.01;
  a.capacity = 2.0;
  a.eta = 0.1;
  return a;
}

}  // namespace

TEST(FlatAnalytic, CapacityPriceExample) {
  // Full-subscription peak load 10/3 against C = 2 gives (1 - 0.6)^(1/3).
  const auto a = example();
  EXPECT_NEAR(flat::min_price(a), std::cbrt(0.4), 1e-12);
  EXPECT_NEAR(flat::min_price(a), 0.7368, 1e-4);
  EXPECT_NEAR(flat::peak_load(a, flat::min_price(a)), 2.0, 1e-12);
}

TEST(FlatAnalytic, CapacityPriceZeroWhenSlack) {
  auto a = example();
  a.capacity = 4.0;
  EXPECT_EQ(flat::min_price(a), 0.0);
}

TEST(FlatAnalytic, SubscriptionAndTrafficLimits) {
  const auto a = example();
  EXPECT_DOUBLE_EQ(flat::subscription_ratio(a, 0.0), 1.0);
  EXPECT_NEAR(flat::total_traffic(a, 0.0), a.n_hat * a.mean_demand(), 1e-9);
  EXPECT_EQ(flat::subscription_ratio(a, 1.0), 0.0);
  EXPECT_EQ(flat::revenue(a, 2.0), 0.0);
  EXPECT_THROW(flat::revenue(a, -0.1), DomainError);
  EXPECT_THROW(flat::revenue_derivative(a, 0.0), DomainError);
}

TEST(FlatAnalytic, SurplusMatchesQuadrature) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto a = oracle::random_params(rng);
    const double p = a.max_flat_price() * criteria::uniform(rng, 0.05, 0.95);
    const double lo = std::pow(p, 1 / a.theta);
    const double want = a.n_hat * oracle::integrate(
                                      [&](double x) { return (std::pow(x, a.theta) - p) * oracle::density(a, x); },
                                      lo, a.phi_max);
    EXPECT_NEAR(flat::surplus(a, p), want, 1e-9 * std::abs(want));
  }
}

TEST(VolumeAnalytic, PsiExamples) {
  auto a = example();
  EXPECT_NEAR(volume::psi(a, 1.0), 1.0, 1e-15);  // (0.5 / 0.5)^2
  EXPECT_NEAR(volume::psi(a, 2.0), 0.25, 1e-15);
  a.theta = 0.25;
  EXPECT_NEAR(volume::psi(a, 0.5), 1.0, 1e-15);  // (0.25 / 0.25)^(4/3)
  EXPECT_NEAR(volume::uncapped_price(example()), 1.0, 1e-15);
  EXPECT_THROW(volume::psi(a, 0.0), DomainError);
}

TEST(VolumeAnalytic, FullDemandBelowUncappedPrice) {
  const auto a = example();
  EXPECT_NEAR(volume::total_traffic(a, 0.5), a.n_hat * a.mean_demand(), 1e-9);
  EXPECT_EQ(volume::total_3g_derivative(a, 0.5), 0.0);
  EXPECT_NEAR(volume::marginal_ratio(a, 0.5), 1.0, 1e-15);
}

TEST(VolumeAnalytic, SurplusMatchesQuadrature) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 20; ++i) {
    const auto a = oracle::random_params(rng);
    const double p = volume::uncapped_price(a) * criteria::uniform(rng, 0.5, 10.0);
    const double q = std::min(oracle::volume_cap(a, p), a.phi_max);
    const auto net = [&](double x) {
      const double used = std::min(x, q);
      return (std::pow(used, a.theta) - p * a.kappa_avg * used) * oracle::density(a, x);
    };
    const double want = a.n_hat * (oracle::integrate(net, 0.0, q) + oracle::integrate(net, q, a.phi_max));
    EXPECT_NEAR(volume::surplus(a, p), want, 1e-9 * std::abs(want));
  }
}

TEST(VolumeAnalytic, UserNetUtilityMatchesDirectEvaluation) {
  const auto a = example();
  for (const double p : {1.5, 3.0}) {
    const double q = volume::psi(a, p);
    for (const double phi : {0.05, 0.1, 0.5, 1.0}) {
      const double x = std::min(phi, q);
      EXPECT_NEAR(volume::user_net_utility(a, p, phi), std::sqrt(x) - p * a.kappa_avg * x, 1e-14);
    }
  }
}

TEST(AnalyticCriteria, ClosedFormsMatchQuadratureOracles) {
  const auto v = criteria::analytic_exactness();
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(AnalyticCriteria, DerivativesMatchFiniteDifferences) {
  const auto v = criteria::derivative_correctness();
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(AnalyticCriteria, RevenueShapes) {
  const auto v = criteria::unimodality();
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(AnalyticCriteria, EquilibriumMonotoneInOffloadingRatios) {
  const auto v = criteria::kappa_monotonicity();
  EXPECT_TRUE(v.pass) << v.detail;
}

TEST(FlatAnalytic, DerivativeSignsAtTheEnds) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 50; ++i) {
    const auto a = oracle::random_params(rng);
    const double pmax = a.max_flat_price();
    EXPECT_GT(flat::revenue_derivative(a, 1e-9 * pmax), 0.0);
    EXPECT_LT(flat::revenue_derivative(a, pmax * (1 - 1e-9)), 0.0);
  }
}

TEST(FlatAnalytic, SecondDerivativeChangesSignAtTheInflection) {
  std::mt19937_64 rng(18);
  int seen = 0;
  for (int i = 0; i < 200 && seen < 20; ++i) {
    const auto a = oracle::random_params(rng);
    const double pbar = flat::inflection_price(a);
    if (!(pbar < a.max_flat_price())) continue;
    ++seen;
    EXPECT_LT(flat::revenue_second_derivative(a, pbar * (1 - 1e-6)), 0.0);
    EXPECT_GT(flat::revenue_second_derivative(a, pbar * (1 + 1e-6)), 0.0);
  }
  EXPECT_GE(seen, 10);
}

TEST(FlatAnalytic, CapacityPriceRisesWithPeakRatio) {
  auto a = example();
  double last = flat::min_price(a);
  for (int k = 1; k <= 20; ++k) {
    a.kappa_peak = 0.01 + 0.02 * k;
    const double p = flat::min_price(a);
    EXPECT_GT(p, last);
    last = p;
  }
}

TEST(VolumeAnalytic, PsiThresholdAndMonotonicity) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 20; ++i) {
    const auto a = oracle::random_params(rng);
    const double threshold = a.theta / (a.kappa_avg * std::pow(a.phi_max, 1 - a.theta));
    EXPECT_GT(volume::psi(a, threshold * (1 - 1e-9)), a.phi_max);
    EXPECT_LT(volume::psi(a, threshold * (1 + 1e-9)), a.phi_max);
    double last = volume::psi(a, 0.01 * threshold);
    for (int k = 1; k <= 1000; ++k) {
      const double q = volume::psi(a, 0.01 * threshold * std::pow(1e4, k / 1000.0));
      ASSERT_LT(q, last);
      last = q;
    }
  }
}

TEST(VolumeAnalytic, ConstantLoadBelowTheCapAndZeroRevenueAtCost) {
  std::mt19937_64 rng(20);
  for (int i = 0; i < 20; ++i) {
    const auto a = oracle::random_params(rng);
    const double full = a.kappa_avg * a.n_hat * a.mean_demand();
    for (const double f : {0.1, 0.5, 0.99}) EXPECT_NEAR(volume::total_3g(a, f * volume::uncapped_price(a)), full, 1e-9 * full);
    EXPECT_EQ(volume::revenue(a, a.eta), 0.0);
  }
}
