#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fixrank/core/arith.hpp"

namespace fixrank {

/// Positive real of the form coefficient * prod(base_i ^ exponent_i) with rational
/// exponents. Carries discriminant and Hecke scalings symbolically so that Gram data
/// stays exact; only value() touches floating point.
class ScaleFactor {
 public:
  ScaleFactor() = default;
  explicit ScaleFactor(Rat coefficient);

  static ScaleFactor power(const Int& base, const Rat& exponent);

  const Rat& coefficient() const noexcept { return coefficient_; }
  const std::vector<std::pair<Int, Rat>>& powers() const noexcept { return powers_; }

  ScaleFactor operator*(const ScaleFactor& other) const;
  ScaleFactor pow(const Rat& exponent) const;

  double value() const;
  double log_value() const;

  /// Sign of (this * q - bound), decided exactly. Requires q >= 0 and bound >= 0.
  int compare_scaled(const Rat& q, const Rat& bound) const;

  /// Exact value when every exponent is integral.
  std::optional<Rat> exact() const;

  std::string to_string() const;

  friend bool operator==(const ScaleFactor& a, const ScaleFactor& b);

 private:
  void normalize();

  Rat coefficient_{1};
  std::vector<std::pair<Int, Rat>> powers_;
};

}  // namespace fixrank
