#pragma once

#include <stdexcept>
#include <string>

namespace qswitch {

/// Raised when an argument breaks an operation's preconditions
/// (shape mismatch, non-Hermitian input, non-unitary gauge, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A density operator has an eigenvalue below the PSD tolerance.
class NonPsdError : public ContractViolation {
 public:
  using ContractViolation::ContractViolation;
};

/// inv_sqrt_psd on a matrix whose smallest eigenvalue is too close to zero.
class NearSingularError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qswitch
