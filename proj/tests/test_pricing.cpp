#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "offload/errors.hpp"
#include "offload/pricing.hpp"

using namespace offload;

TEST(Payment, TwoTierZeroTrafficPaysNothing) {
  const TwoTierPricing s{20, 50, 3};
  EXPECT_EQ(payment(s, Eigen::Vector2d(0, 0), Eigen::Vector2i(0, 0)), 0.0);
  EXPECT_EQ(payment(s, Eigen::Vector2d(1, 2), Eigen::Vector2i(0, 0)), 20.0);  // boundary charges fee1
  EXPECT_EQ(payment(s, Eigen::Vector2d(1, 2.01), Eigen::Vector2i(0, 0)), 50.0);
}

TEST(Payment, VolumeIsLinear) {
  EXPECT_DOUBLE_EQ(payment(VolumePricing{2}, Eigen::Vector2d(1, 3), Eigen::Vector2i(0, 0)), 8.0);
}

TEST(Payment, FlatChargesSubscribersOnly) {
  EXPECT_EQ(payment(FlatPricing{5}, Eigen::Vector2d(0, 0), Eigen::Vector2i(0, 0), false), 0.0);
  EXPECT_EQ(payment(FlatPricing{5}, Eigen::Vector2d(3, 0), Eigen::Vector2i(0, 0), true), 5.0);
}

TEST(Payment, CongestionChargesTransmissionCell) {
  Eigen::MatrixXd p(2, 2);
  p << 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(payment(CongestionPricing{p}, Eigen::Vector2d(1, 1), Eigen::Vector2i(1, 0)), 2 + 3);
  EXPECT_THROW(payment(CongestionPricing{p}, Eigen::Vector2d(1, 1), Eigen::Vector2i(2, 0)), ContractViolation);
}

TEST(Payment, NegativeTrafficIsAContractViolation) {
  for (const PricingScheme& s : {PricingScheme{FlatPricing{1}}, PricingScheme{VolumePricing{1}},
                                 PricingScheme{TwoTierPricing{1, 2, 3}}}) {
    EXPECT_THROW(payment(s, Eigen::Vector2d(1, -1e-12), Eigen::Vector2i(0, 0)), ContractViolation);
  }
}

TEST(Payment, ReductionsAndMonotonicity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const int T = 24, S = 4;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd y(T);
    Eigen::VectorXi path(T);
    for (int t = 0; t < T; ++t) {
      y(t) = u(rng);
      path(t) = static_cast<int>(u(rng) / 3.0 * S) % S;
    }
    const double p = u(rng);
    const CongestionPricing c{Eigen::MatrixXd::Constant(T, S, p)};
    EXPECT_NEAR(payment(c, y, path), payment(VolumePricing{p}, y, path), 1e-12 * (1 + p * y.sum()));
    const TwoTierPricing tt{p, 2 * p + 1, std::numeric_limits<double>::infinity()};
    EXPECT_EQ(payment(tt, y, path), payment(FlatPricing{p}, y, path));

    Eigen::MatrixXd m(T, S);
    for (int k = 0; k < m.size(); ++k) m.data()[k] = u(rng);
    Eigen::VectorXd z = y;
    z(trial % T) += u(rng);
    EXPECT_LE(payment(VolumePricing{p}, y, path), payment(VolumePricing{p}, z, path));
    EXPECT_LE(payment(CongestionPricing{m}, y, path), payment(CongestionPricing{m}, z, path));
  }
}

TEST(PricingScheme, ValidationRejectsDominatedTiers) {
  EXPECT_THROW(validate(TwoTierPricing{5, 4, 1}), ConfigError);
  EXPECT_THROW(validate(TwoTierPricing{1, 4, 0}), ConfigError);
  EXPECT_THROW(validate(FlatPricing{-1}), ConfigError);
  EXPECT_THROW(validate(VolumePricing{-1}), ConfigError);
  EXPECT_THROW(validate(CongestionPricing{Eigen::MatrixXd::Constant(2, 2, -1)}), ConfigError);
  EXPECT_NO_THROW(validate(TwoTierPricing{4, 4, 1}));
}

TEST(PricingScheme, FamilyNames) {
  EXPECT_EQ(parse_scheme_family("two-tier"), SchemeFamily::two_tier);
  EXPECT_EQ(parse_scheme_family("congestion"), SchemeFamily::congestion);
  EXPECT_THROW(parse_scheme_family("auction"), ConfigError);
  for (auto f : {SchemeFamily::flat, SchemeFamily::two_tier, SchemeFamily::volume, SchemeFamily::congestion})
    EXPECT_EQ(parse_scheme_family(to_string(f)), f);
  EXPECT_EQ(family_of(VolumePricing{1}), SchemeFamily::volume);
  EXPECT_NE(describe(FlatPricing{2}).find("flat"), std::string::npos);
}
