#include "fixrank/core/scale.hpp"

#include <algorithm>
#include <cmath>

#include "fixrank/core/errors.hpp"

namespace fixrank {

namespace {

double log_of(const Int& x) {
  long exp = 0;
  double mant = mpz_get_d_2exp(&exp, x.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

ScaleFactor::ScaleFactor(Rat coefficient) : coefficient_(std::move(coefficient)) {
  if (coefficient_ <= 0) throw DomainError("scale factors must be positive");
}

ScaleFactor ScaleFactor::power(const Int& base, const Rat& exponent) {
  if (base <= 0) throw DomainError("scale base must be positive");
  ScaleFactor s;
  s.powers_.emplace_back(base, exponent);
  s.normalize();
  return s;
}

ScaleFactor ScaleFactor::operator*(const ScaleFactor& other) const {
  ScaleFactor s = *this;
  s.coefficient_ *= other.coefficient_;
  s.powers_.insert(s.powers_.end(), other.powers_.begin(), other.powers_.end());
  s.normalize();
  return s;
}

ScaleFactor ScaleFactor::pow(const Rat& exponent) const {
  ScaleFactor s;
  s.coefficient_ = 1;
  if (is_integral(exponent)) {
    long e = exponent.get_num().get_si();
    Rat c = 1;
    Rat base = e >= 0 ? coefficient_ : Rat(1 / coefficient_);
    for (long i = 0; i < std::labs(e); ++i) c *= base;
    s.coefficient_ = c;
  } else {
    s.powers_.emplace_back(coefficient_.get_num(), exponent);
    s.powers_.emplace_back(coefficient_.get_den(), Rat(-exponent));
  }
  for (const auto& [b, e] : powers_) s.powers_.emplace_back(b, e * exponent);
  s.normalize();
  return s;
}

void ScaleFactor::normalize() {
  std::sort(powers_.begin(), powers_.end(),
            [](const auto& a, const auto& b) { return cmp(a.first, b.first) < 0; });
  std::vector<std::pair<Int, Rat>> merged;
  for (auto& [b, e] : powers_) {
    if (!merged.empty() && merged.back().first == b) {
      merged.back().second += e;
    } else {
      merged.emplace_back(b, e);
    }
  }
  powers_.clear();
  for (auto& [b, e] : merged) {
    if (b == 1 || e == 0) continue;
    if (is_integral(e)) {
      long k = e.get_num().get_si();
      Rat f = int_pow(b, static_cast<unsigned long>(std::labs(k)));
      if (k < 0) f = 1 / f;
      coefficient_ *= f;
      continue;
    }
    powers_.emplace_back(b, e);
  }
}

double ScaleFactor::log_value() const {
  double l = log_of(coefficient_.get_num()) - log_of(coefficient_.get_den());
  for (const auto& [b, e] : powers_) l += to_double(e) * log_of(b);
  return l;
}

double ScaleFactor::value() const {
  if (powers_.empty()) return to_double(coefficient_);
  return std::exp(log_value());
}

std::optional<Rat> ScaleFactor::exact() const {
  if (powers_.empty()) return coefficient_;
  return std::nullopt;
}

int ScaleFactor::compare_scaled(const Rat& q, const Rat& bound) const {
  if (q == 0) return bound == 0 ? 0 : -1;
  if (bound == 0) return 1;
  // Raise both sides to the common exponent denominator so everything is rational.
  Int l = 1;
  for (const auto& [b, e] : powers_) l = lcm(l, e.get_den());
  const unsigned long el = l.get_ui();
  Rat lhs = coefficient_ * q;
  Rat rhs = bound;
  Rat lhs_pow = 1, rhs_pow = 1;
  for (unsigned long i = 0; i < el; ++i) {
    lhs_pow *= lhs;
    rhs_pow *= rhs;
  }
  for (const auto& [b, e] : powers_) {
    Rat scaled = e * l;
    long k = scaled.get_num().get_si();
    Int f = int_pow(b, static_cast<unsigned long>(std::labs(k)));
    if (k > 0)
      lhs_pow *= f;
    else
      rhs_pow *= f;
  }
  return cmp(lhs_pow, rhs_pow) < 0 ? -1 : (lhs_pow == rhs_pow ? 0 : 1);
}

std::string ScaleFactor::to_string() const {
  std::string s = fixrank::to_string(coefficient_);
  for (const auto& [b, e] : powers_) s += " * " + b.get_str() + "^(" + fixrank::to_string(e) + ")";
  return s;
}

bool operator==(const ScaleFactor& a, const ScaleFactor& b) {
  if (a.coefficient_ != b.coefficient_ || a.powers_.size() != b.powers_.size()) return false;
  for (std::size_t i = 0; i < a.powers_.size(); ++i)
    if (a.powers_[i].first != b.powers_[i].first || a.powers_[i].second != b.powers_[i].second)
      return false;
  return true;
}

}  // namespace fixrank
