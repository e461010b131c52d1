#pragma once

#include <stdexcept>
#include <string>

namespace ghcm {

/// Caller broke a documented precondition (mismatched sizes, empty inputs).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a function (y > r, x not in support).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid or unsupported configuration; maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The family violates a modelling assumption required by the selected algorithm.
class AssumptionViolation : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace ghcm
