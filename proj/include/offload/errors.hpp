#pragma once

#include <stdexcept>

namespace offload {

/// Invalid or inconsistent configuration input.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of an analytic formula.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Caller broke a documented precondition (e.g. negative traffic).
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace offload
