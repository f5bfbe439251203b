#pragma once

#include <stdexcept>
#include <string>

namespace ordcover {

/// Precondition violated by the caller (empty sample list, bad epsilon, ...).
class argument_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed serialized input.
class parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Well-formed input that breaks a domain invariant (non-monotone lift,
/// determinant far from 1, ...).
class invariant_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Floating point result too ill-conditioned to certify an integer winding.
class numeric_instability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ordcover
