#pragma once

#include <stdexcept>
#include <string>

namespace dcmicro {

// Index beyond a truncation limit (K_max, max_order, ...).
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Caller violated a stated precondition.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct OutOfWorkingRadius : DomainError {
  using DomainError::DomainError;
};

struct ConeViolation : DomainError {
  using DomainError::DomainError;
};

struct InadmissibleSolution : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dcmicro
