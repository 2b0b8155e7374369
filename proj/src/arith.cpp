#include "fixrank/core/arith.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fixrank/core/errors.hpp"

namespace fixrank {

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat rat_from_double(double x) {
  if (!std::isfinite(x)) throw DomainError("non-finite double has no rational value");
  Rat r;
  mpq_set_d(r.get_mpq_t(), x);
  return r;
}

double to_double(const Rat& x) { return x.get_d(); }
double to_double(const Int& x) { return x.get_d(); }

std::string to_string(const Int& x) { return x.get_str(); }

std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x == 0.0 ? 0.0 : x);
  return buf;
}

std::string to_string(const Rat& x) {
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

Int parse_int(std::string_view text) {
  Int v;
  std::string s(text);
  if (s.empty() || v.set_str(s, 10) != 0) throw ValidationError("not an integer: '" + s + "'");
  return v;
}

Rat parse_rat(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ValidationError("empty rational");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    return make_rat(parse_int(s.substr(0, slash)), parse_int(s.substr(slash + 1)));
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    bool negative = !s.empty() && s[0] == '-';
    std::string whole = s.substr(negative ? 1 : 0, dot - (negative ? 1 : 0));
    std::string frac = s.substr(dot + 1);
    if (whole.empty()) whole = "0";
    Int num = parse_int(whole + frac);
    Int den = int_pow(Int(10), frac.size());
    Rat r = make_rat(num, den);
    return negative ? Rat(-r) : r;
  }
  return Rat(parse_int(s));
}

bool is_integral(const Rat& x) { return x.get_den() == 1; }

Int floor_rat(const Rat& x) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Int round_rat(const Rat& x) { return floor_rat(x + Rat(1, 2)); }

Int gcd(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

Int lcm(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

Int xgcd(const Int& a, const Int& b, Int& s, Int& t) {
  Int g;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

std::uint64_t mod_u64(const Int& x, std::uint64_t p) {
  Int r;
  Int pp(static_cast<unsigned long>(p));
  mpz_fdiv_r(r.get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t());
  return r.get_ui();
}

std::uint64_t mod_u64(const Rat& x, std::uint64_t p) {
  std::uint64_t den = mod_u64(x.get_den(), p);
  if (den == 0) throw DomainError("denominator not invertible modulo " + std::to_string(p));
  return mul_mod(mod_u64(x.get_num(), p), inv_mod(den, p), p);
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  a %= p;
  while (e > 0) {
    if (e & 1U) result = mul_mod(result, a, p);
    a = mul_mod(a, a, p);
    e >>= 1U;
  }
  return result;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
  Int s, t;
  Int g = xgcd(Int(static_cast<unsigned long>(a % p)), Int(static_cast<unsigned long>(p)), s, t);
  if (g != 1) throw DomainError("element not invertible modulo " + std::to_string(p));
  return mod_u64(s, p);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t q = 2; q * q <= n; ++q) {
    if (n % q == 0) return false;
  }
  return true;
}

Int int_pow(const Int& base, unsigned long exponent) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exponent);
  return r;
}

}  // namespace fixrank
