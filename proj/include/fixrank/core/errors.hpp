#pragma once

#include <stdexcept>
#include <string>

namespace fixrank {

/// A precondition or parameter window was violated.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An arithmetic domain error (division by zero, mixing fields, non-integral input).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Floating evaluation could not certify the requested accuracy.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An enumeration would exceed its configured size cap.
class CapExceeded : public std::runtime_error {
 public:
  CapExceeded(const std::string& what, double estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

}  // namespace fixrank
