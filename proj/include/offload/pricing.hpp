#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <Eigen/Dense>

namespace offload {

struct FlatPricing {
  double fee = 0.0;
};

struct TwoTierPricing {
  double fee1 = 0.0;
  double fee2 = 0.0;
  double cap1 = 0.0;  // daily 3G volume covered by fee1
};

struct VolumePricing {
  double unit_price = 0.0;
};

struct CongestionPricing {
  Eigen::MatrixXd unit_price;  // slot x cell
};

using PricingScheme = std::variant<FlatPricing, TwoTierPricing, VolumePricing, CongestionPricing>;

enum class SchemeFamily { flat, two_tier, volume, congestion };

std::string_view to_string(SchemeFamily family);
SchemeFamily parse_scheme_family(std::string_view name);
SchemeFamily family_of(const PricingScheme& scheme);

/// Throws ConfigError on negative prices, fee1 > fee2 or cap1 <= 0.
void validate(const PricingScheme& scheme);

/// m(p, y). Flat charges its fee only when `subscribed`; the other schemes derive
/// the charge from y. Negative traffic throws ContractViolation.
double payment(const PricingScheme& scheme, const Eigen::VectorXd& y,
               const Eigen::VectorXi& cell_path, bool subscribed = true);

/// One-line human summary, e.g. "volume(unit_price=0.41)".
std::string describe(const PricingScheme& scheme);

}  // namespace offload
