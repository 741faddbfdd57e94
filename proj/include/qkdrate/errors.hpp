#pragma once

#include <stdexcept>
#include <string>

namespace qkdrate {

// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The channel produced no sifted detections, so the bit error rate is undefined.
class DegenerateChannelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition of a validation routine was not met.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace qkdrate
