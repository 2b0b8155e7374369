#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fixrank {

using Int = mpz_class;
using Rat = mpq_class;
using IntVector = std::vector<Int>;
using RatVector = std::vector<Rat>;

/// Canonicalized num/den.
Rat make_rat(const Int& num, const Int& den);

/// Exact rational value of a finite double.
Rat rat_from_double(double x);

double to_double(const Rat& x);
double to_double(const Int& x);

/// Serialization used by every exact value in output files: always "num/den".
std::string to_string(const Rat& x);
std::string to_string(const Int& x);

/// Accepts "p", "-p", "p/q" and plain decimals such as "0.25".
Rat parse_rat(std::string_view text);

/// Decimal text with 15 significant digits, the format of every float in output files.
std::string format_real(double x);
Int parse_int(std::string_view text);

bool is_integral(const Rat& x);
Int floor_rat(const Rat& x);
Int round_rat(const Rat& x);  // ties toward +infinity

Int gcd(const Int& a, const Int& b);
Int lcm(const Int& a, const Int& b);

/// Extended gcd: returns g >= 0 with g = s*a + t*b.
Int xgcd(const Int& a, const Int& b, Int& s, Int& t);

/// Non-negative residue of x modulo a positive p.
std::uint64_t mod_u64(const Int& x, std::uint64_t p);
std::uint64_t mod_u64(const Rat& x, std::uint64_t p);  // den must be invertible mod p

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod(std::uint64_t a, std::uint64_t e, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

bool is_prime(std::uint64_t n);

/// Integer power with exact result.
Int int_pow(const Int& base, unsigned long exponent);

}  // namespace fixrank
