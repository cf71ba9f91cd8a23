#include "offload/pricing.hpp"

#include <sstream>

#include "offload/errors.hpp"

namespace offload {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view to_string(SchemeFamily family) {
  switch (family) {
    case SchemeFamily::flat: return "flat";
    case SchemeFamily::two_tier: return "two_tier";
    case SchemeFamily::volume: return "volume";
    case SchemeFamily::congestion: return "congestion";
  }
  return "unknown";
}

SchemeFamily parse_scheme_family(std::string_view name) {
  if (name == "flat") return SchemeFamily::flat;
  if (name == "two_tier" || name == "two-tier" || name == "tiered") return SchemeFamily::two_tier;
  if (name == "volume") return SchemeFamily::volume;
  if (name == "congestion") return SchemeFamily::congestion;
  throw ConfigError("unknown pricing scheme '" + std::string(name) + "'");
}

SchemeFamily family_of(const PricingScheme& scheme) {
  return static_cast<SchemeFamily>(scheme.index());
}

void validate(const PricingScheme& scheme) {
  std::visit(overloaded{
                 [](const FlatPricing& s) {
                   if (!(s.fee >= 0.0)) throw ConfigError("flat fee must be non-negative");
                 },
                 [](const TwoTierPricing& s) {
                   if (!(s.fee1 >= 0.0 && s.fee2 >= 0.0))
                     throw ConfigError("two-tier fees must be non-negative");
                   if (s.fee1 > s.fee2) throw ConfigError("two-tier requires fee1 <= fee2");
                   if (!(s.cap1 > 0.0)) throw ConfigError("two-tier cap must be positive");
                 },
                 [](const VolumePricing& s) {
                   if (!(s.unit_price >= 0.0)) throw ConfigError("unit price must be non-negative");
                 },
                 [](const CongestionPricing& s) {
                   if (s.unit_price.size() == 0) throw ConfigError("congestion matrix is empty");
                   if (!s.unit_price.allFinite() || (s.unit_price.array() < 0.0).any())
                     throw ConfigError("congestion prices must be finite and non-negative");
                 },
             },
             scheme);
}

double payment(const PricingScheme& scheme, const Eigen::VectorXd& y,
               const Eigen::VectorXi& cell_path, bool subscribed) {
  if ((y.array() < 0.0).any()) throw ContractViolation("payment: negative traffic");
  return std::visit(
      overloaded{
          [&](const FlatPricing& s) { return subscribed ? s.fee : 0.0; },
          [&](const TwoTierPricing& s) {
            const double total = y.sum();
            if (!subscribed || total <= 0.0) return 0.0;
            return total <= s.cap1 ? s.fee1 : s.fee2;
          },
          [&](const VolumePricing& s) { return s.unit_price * y.sum(); },
          [&](const CongestionPricing& s) {
            if (cell_path.size() != y.size() || s.unit_price.rows() != y.size())
              throw ContractViolation("payment: congestion matrix / path / traffic shape mismatch");
            double m = 0.0;
            for (Eigen::Index t = 0; t < y.size(); ++t) {
              if (cell_path(t) < 0 || cell_path(t) >= s.unit_price.cols())
                throw ContractViolation("payment: cell id outside the congestion matrix");
              if (y(t) > 0.0) m += s.unit_price(t, cell_path(t)) * y(t);
            }
            return m;
          },
      },
      scheme);
}

std::string describe(const PricingScheme& scheme) {
  std::ostringstream os;
  os.precision(6);
  std::visit(overloaded{
                 [&](const FlatPricing& s) { os << "flat(fee=" << s.fee << ")"; },
                 [&](const TwoTierPricing& s) {
                   os << "two_tier(fee1=" << s.fee1 << ", fee2=" << s.fee2 << ", cap1=" << s.cap1 << ")";
                 },
                 [&](const VolumePricing& s) { os << "volume(unit_price=" << s.unit_price << ")"; },
                 [&](const CongestionPricing& s) {
                   os << "congestion(" << s.unit_price.rows() << "x" << s.unit_price.cols()
                      << ", mean=" << s.unit_price.mean() << ", min=" << s.unit_price.minCoeff()
                      << ", max=" << s.unit_price.maxCoeff() << ")";
                 },
             },
             scheme);
  return os.str();
}

}  // namespace offload
