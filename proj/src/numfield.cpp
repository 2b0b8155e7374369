#include "fixrank/numfield.hpp"

#include <algorithm>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fixrank/core/errors.hpp"

namespace fixrank {

namespace mp = boost::multiprecision;
using Real = mp::mpfr_float;

namespace {

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

struct Cx {
  Real re{0};
  Real im{0};
};

Cx operator-(const Cx& a, const Cx& b) { return {a.re - b.re, a.im - b.im}; }
Cx operator*(const Cx& a, const Cx& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Real abs2(const Cx& a) { return a.re * a.re + a.im * a.im; }
Cx operator/(const Cx& a, const Cx& b) {
  Real n = abs2(b);
  return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
}
Cx conj(const Cx& a) { return {a.re, -a.im}; }

Cx cx_pow(const Cx& z, std::size_t e) {
  Cx r{Real(1), Real(0)};
  for (std::size_t i = 0; i < e; ++i) r = r * z;
  return r;
}

Cx eval_poly(const IntVector& f, const Cx& z) {
  Cx acc;
  for (std::size_t i = f.size(); i-- > 0;) {
    acc = acc * z;
    acc.re += Real(f[i].get_str());
  }
  return acc;
}

Cx eval_rat_poly(const RatVector& f, const Cx& z) {
  Cx acc;
  for (std::size_t i = f.size(); i-- > 0;) {
    acc = acc * z;
    acc.re += Real(f[i].get_num().get_str()) / Real(f[i].get_den().get_str());
  }
  return acc;
}

std::vector<Cx> durand_kerner(const IntVector& f, int digits) {
  const std::size_t d = f.size() - 1;
  if (d == 1) return {Cx{Real(Int(-f[0]).get_str()), Real(0)}};
  Real bound = 1;
  for (std::size_t i = 0; i < d; ++i) bound = mp::max(bound, Real(Int(abs(f[i])).get_str()) + 1);
  std::vector<Cx> z(d);
  const Real pi = mp::atan(Real(1)) * 4;
  for (std::size_t k = 0; k < d; ++k) {
    Real ang = 2 * pi * k / d + Real(0.4);
    z[k] = {bound * mp::cos(ang), bound * mp::sin(ang)};
  }
  const Real tol = mp::pow(Real(10), -digits);
  for (int iter = 0; iter < 5000; ++iter) {
    Real worst = 0;
    for (std::size_t k = 0; k < d; ++k) {
      Cx den{Real(1), Real(0)};
      for (std::size_t j = 0; j < d; ++j)
        if (j != k) den = den * (z[k] - z[j]);
      Cx step = eval_poly(f, z[k]) / den;
      z[k] = z[k] - step;
      worst = mp::max(worst, mp::sqrt(abs2(step)));
    }
    if (worst < tol) return z;
  }
  throw PrecisionError("root isolation did not converge at " + std::to_string(digits) + " digits");
}

// Polynomials over Q, constant term first, for the Sturm sequence.
using RatPoly = std::vector<Rat>;

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly poly_rem(RatPoly a, const RatPoly& b) {
  trim(a);
  while (a.size() >= b.size() && !a.empty()) {
    Rat c = a.back() / b.back();
    std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    trim(a);
  }
  return a;
}

int sign_at_infinity(const RatPoly& p, bool positive) {
  int s = sgn(p.back());
  if (!positive && (p.size() - 1) % 2 == 1) s = -s;
  return s;
}

int sign_changes(const std::vector<RatPoly>& seq, bool positive) {
  int changes = 0, last = 0;
  for (const auto& p : seq) {
    int s = sign_at_infinity(p, positive);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

std::vector<Int> divisors_signed(const Int& n) {
  std::vector<Int> out;
  Int a = abs(n);
  for (Int i = 1; i * i <= a; ++i) {
    if (a % i != 0) continue;
    Int j = a / i;
    out.push_back(i);
    out.push_back(-i);
    if (j != i) {
      out.push_back(j);
      out.push_back(-j);
    }
  }
  return out;
}

Int eval_int(const IntVector& f, const Int& x) {
  Int acc = 0;
  for (std::size_t i = f.size(); i-- > 0;) acc = acc * x + f[i];
  return acc;
}

bool is_square(const Int& n) {
  if (n < 0) return false;
  return mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

RatVector poly_mul_mod(const RatVector& a, const RatVector& b, const IntVector& f) {
  const std::size_t d = f.size() - 1;
  RatVector prod(2 * d - 1);
  for (std::size_t i = 0; i < d; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < d; ++j) prod[i + j] += a[i] * b[j];
  }
  for (std::size_t k = prod.size(); k-- > d;) {
    if (prod[k] == 0) continue;
    Rat c = prod[k];
    for (std::size_t i = 0; i < d; ++i) prod[k - d + i] -= c * f[i];
    prod[k] = 0;
  }
  prod.resize(d);
  return prod;
}

std::vector<std::string> split_values(const std::string& s) {
  std::string t = s;
  for (char& c : t)
    if (c == ',' || c == '[' || c == ']' || c == '(' || c == ')' || c == ';') c = ' ';
  std::istringstream in(t);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim_ws(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

namespace detail {

int count_real_roots(const IntVector& poly) {
  RatPoly p(poly.begin(), poly.end());
  trim(p);
  if (p.size() <= 1) return 0;
  RatPoly dp(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = p[i] * static_cast<long>(i);
  std::vector<RatPoly> seq{p, dp};
  while (seq.back().size() > 1) {
    RatPoly r = poly_rem(seq[seq.size() - 2], seq.back());
    if (r.empty()) break;
    for (auto& c : r) c = -c;
    seq.push_back(std::move(r));
  }
  return sign_changes(seq, false) - sign_changes(seq, true);
}

std::optional<bool> is_irreducible_small(const IntVector& poly) {
  const std::size_t d = poly.size() - 1;
  if (d == 1) return true;
  if (d > 4) return std::nullopt;
  if (poly[0] == 0) return false;
  for (const auto& r : divisors_signed(poly[0]))
    if (eval_int(poly, r) == 0) return false;
  if (d <= 3) return true;
  // Monic quartic without roots: look for (x^2+bx+c)(x^2+ex+g).
  const Int &a0 = poly[0], &a1 = poly[1], &a2 = poly[2], &a3 = poly[3];
  for (const auto& c : divisors_signed(a0)) {
    Int g = a0 / c;
    if (c != g) {
      Int num = a1 - a3 * c, den = g - c;
      if (num % den != 0) continue;
      Int b = num / den, e = a3 - b;
      if (b * e == a2 - c - g) return false;
    } else {
      if (c * a3 != a1) continue;
      if (is_square(a3 * a3 - 4 * (a2 - 2 * c))) return false;
    }
  }
  return true;
}

IntVector power_sums(const IntVector& f, std::size_t count) {
  const std::size_t d = f.size() - 1;
  IntVector p(count);
  if (count == 0) return p;
  p[0] = static_cast<long>(d);
  for (std::size_t k = 1; k < count; ++k) {
    Int s = 0;
    for (std::size_t i = 1; i <= std::min(k - 1, d); ++i) s += f[d - i] * p[k - i];
    if (k <= d) s += static_cast<long>(k) * f[d - k];
    p[k] = -s;
  }
  return p;
}

}  // namespace detail

FieldPtr NumberField::make(const IntVector& min_poly, const std::optional<RatMatrix>& integral_basis,
                           int precision_digits) {
  if (min_poly.size() < 2) throw ValidationError("min_poly must have degree >= 1");
  if (min_poly.back() != 1) throw ValidationError("min_poly must be monic");
  if (precision_digits < 15) throw ValidationError("precision_digits must be at least 15");

  std::shared_ptr<NumberField> k(new NumberField());
  const std::size_t d = min_poly.size() - 1;
  k->degree_ = static_cast<int>(d);
  k->min_poly_ = min_poly;
  k->precision_digits_ = precision_digits;

  auto irreducible = detail::is_irreducible_small(min_poly);
  k->irreducibility_checked_ = irreducible.has_value();
  if (irreducible && !*irreducible) throw ValidationError("min_poly is reducible over Q");

  k->basis_ = integral_basis ? *integral_basis : RatMatrix::identity(d);
  const RatMatrix& b = k->basis_;
  if (b.rows() != d || b.cols() != d) throw ValidationError("integral_basis must be d x d");
  if (b(0, 0) != 1)
    throw ValidationError("integral_basis must start with u_1 = 1");
  for (std::size_t j = 1; j < d; ++j)
    if (b(0, j) != 0) throw ValidationError("integral_basis must start with u_1 = 1");
  auto binv = inverse(b);
  if (!binv) throw ValidationError("integral_basis is singular");
  k->basis_inverse_ = *binv;
  Rat det_b = determinant(b);
  Rat idx = 1 / abs(det_b);
  if (!is_integral(idx)) throw ValidationError("integral_basis does not contain Z[theta]");
  k->index_ = idx.get_num();

  // Multiplication matrices; integrality certifies the basis spans an order.
  k->mult_.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    RatMatrix m(d, d);
    RatVector uj = b.row_vector(j);
    for (std::size_t i = 0; i < d; ++i) {
      RatVector prod = poly_mul_mod(b.row_vector(i), uj, min_poly);
      RatVector c = row_times(prod, k->basis_inverse_);
      for (std::size_t t = 0; t < d; ++t) m(i, t) = c[t];
    }
    try {
      k->mult_[j] = to_int(m);
    } catch (const DomainError&) {
      throw ValidationError("integral_basis is not closed under multiplication");
    }
  }
  if (d >= 2) {
    RatVector theta(d);
    theta[1] = 1;
    if (common_denominator(row_times(theta, k->basis_inverse_)) != 1)
      throw ValidationError("integral_basis does not contain theta");
  }

  // Exact trace form and discriminant.
  IntVector ps = detail::power_sums(min_poly, 2 * d - 1);
  RatMatrix t_pow(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) t_pow(i, j) = Rat(ps[i + j]);
  k->trace_form_ = to_int(b * t_pow * b.transpose());
  k->discriminant_ = determinant(k->trace_form_);
  if (k->discriminant_ == 0) throw ValidationError("min_poly is not separable");

  // Signature: exact Sturm count cross-checked against the numerical roots.
  const int r1 = detail::count_real_roots(min_poly);
  k->signature_ = {r1, static_cast<int>(d - r1) / 2};
  if ((sgn(k->discriminant_) < 0) != (k->signature_.complex % 2 == 1))
    throw ValidationError("discriminant sign disagrees with the signature");

  PrecisionScope scope(static_cast<unsigned>(precision_digits + 10));
  std::vector<Cx> all = durand_kerner(min_poly, precision_digits);
  const Real real_tol = mp::pow(Real(10), -(precision_digits / 2));
  std::vector<Cx> reals, pairs;
  for (auto& z : all) {
    if (mp::abs(z.im) < real_tol) {
      z.im = 0;
      reals.push_back(z);
    } else if (z.im > 0) {
      pairs.push_back(z);
    }
  }
  if (static_cast<int>(reals.size()) != r1 || static_cast<int>(pairs.size()) != k->signature_.complex)
    throw PrecisionError("numerical roots disagree with the Sturm count; raise precision_digits");
  std::sort(reals.begin(), reals.end(), [](const Cx& a, const Cx& c) { return a.re < c.re; });
  std::sort(pairs.begin(), pairs.end(), [](const Cx& a, const Cx& c) { return a.re < c.re; });
  for (const auto& z : reals) k->roots_.emplace_back(z.re.convert_to<double>(), 0.0);
  for (const auto& z : pairs) k->roots_.emplace_back(z.re.convert_to<double>(), z.im.convert_to<double>());

  // Positive trace form Tr(theta^i conj(theta)^j): rational only for totally real and CM fields.
  IntMatrix g_pow(d, d);
  const Real int_tol = mp::pow(Real(10), -(precision_digits / 2));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Real s = 0;
      for (const auto& z : reals) s += (cx_pow(z, i) * cx_pow(z, j)).re;
      for (const auto& z : pairs) s += 2 * (cx_pow(z, i) * cx_pow(conj(z), j)).re;
      Real r = mp::round(s);
      if (mp::abs(s - r) > int_tol)
        throw DomainError("Tr(x conj(x)) is not rational on this field; only totally real and CM fields are supported");
      mpfr_get_z(g_pow(i, j).get_mpz_t(), r.backend().data(), MPFR_RNDN);
    }
  RatMatrix g = b * to_rat(g_pow) * b.transpose();
  k->trace_gram_ = to_int(g);
  if (abs(determinant(k->trace_gram_)) != abs(k->discriminant_))
    throw DomainError("positive trace form determinant differs from |disc|; field is not CM");

  k->norm_scale_ = ScaleFactor::power(abs(k->discriminant_), Rat(-1, static_cast<long>(d)));

  // Scaled Minkowski embedding of the integral basis.
  Real s = mp::pow(Real(Int(abs(k->discriminant_)).get_str()), Real(-1) / (2 * Real(static_cast<long>(d))));
  Real sq2 = mp::sqrt(Real(2));
  k->embedding_ = Matrix<double>(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    RatVector uj = b.row_vector(j);
    std::size_t c = 0;
    for (const auto& z : reals) k->embedding_(j, c++) = (s * eval_rat_poly(uj, z).re).convert_to<double>();
    for (const auto& z : pairs) {
      Cx v = eval_rat_poly(uj, z);
      k->embedding_(j, c++) = (s * sq2 * v.re).convert_to<double>();
      k->embedding_(j, c++) = (s * sq2 * v.im).convert_to<double>();
    }
  }
  return k;
}

FieldPtr NumberField::rationals() {
  static const FieldPtr q = make(IntVector{Int(0), Int(1)});
  return q;
}

RatMatrix NumberField::mult_matrix(const RatVector& w) const {
  const std::size_t d = degree_;
  RatMatrix m(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    if (w[j] == 0) continue;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) m(r, c) += w[j] * mult_[j](r, c);
  }
  return m;
}

RatVector NumberField::to_basis_coords(const RatVector& power_coords) const {
  return row_times(power_coords, basis_inverse_);
}

RatVector NumberField::to_power_coords(const RatVector& basis_coords) const {
  return row_times(basis_coords, basis_);
}

std::string NumberField::fingerprint() const {
  std::string s;
  for (const auto& c : min_poly_) s += c.get_str() + ",";
  s += "|";
  for (const auto& x : basis_.data()) s += fixrank::to_string(x) + ",";
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

std::string NumberField::describe() const {
  std::ostringstream out;
  out << "degree " << degree_ << ", signature (" << signature_.real << "," << signature_.complex
      << "), disc " << discriminant_.get_str();
  return out.str();
}

bool operator==(const NumberField& a, const NumberField& b) {
  return a.min_poly_ == b.min_poly_ && a.basis_ == b.basis_;
}

// ---- FieldElement ----

FieldElement::FieldElement(FieldPtr field, RatVector power_coords)
    : field_(std::move(field)), coords_(std::move(power_coords)) {
  if (!field_) throw DomainError("element without a field");
  if (coords_.size() != static_cast<std::size_t>(field_->degree()))
    throw DomainError("coordinate vector has wrong length");
}

FieldElement FieldElement::from_rational(FieldPtr field, const Rat& value) {
  RatVector c(field->degree());
  c[0] = value;
  return FieldElement(std::move(field), std::move(c));
}

FieldElement FieldElement::from_basis_coords(FieldPtr field, const RatVector& basis_coords) {
  RatVector c = field->to_power_coords(basis_coords);
  return FieldElement(std::move(field), std::move(c));
}

FieldElement FieldElement::generator(FieldPtr field) {
  RatVector c(field->degree());
  if (c.size() == 1)
    c[0] = Rat(-field->min_poly()[0]);
  else
    c[1] = 1;
  return FieldElement(std::move(field), std::move(c));
}

RatVector FieldElement::basis_coords() const { return field_->to_basis_coords(coords_); }

bool FieldElement::is_zero() const {
  return std::all_of(coords_.begin(), coords_.end(), [](const Rat& x) { return x == 0; });
}

bool FieldElement::is_integral() const { return common_denominator(basis_coords()) == 1; }

void FieldElement::check_same(const FieldElement& o) const {
  if (!field_ || !o.field_) throw DomainError("uninitialized field element");
  if (field_ != o.field_ && !(*field_ == *o.field_)) throw DomainError("elements belong to different fields");
}

FieldElement FieldElement::operator+(const FieldElement& o) const {
  check_same(o);
  RatVector c = coords_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.coords_[i];
  return FieldElement(field_, std::move(c));
}

FieldElement FieldElement::operator-(const FieldElement& o) const {
  check_same(o);
  RatVector c = coords_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= o.coords_[i];
  return FieldElement(field_, std::move(c));
}

FieldElement FieldElement::operator-() const {
  RatVector c = coords_;
  for (auto& x : c) x = -x;
  return FieldElement(field_, std::move(c));
}

FieldElement FieldElement::operator*(const FieldElement& o) const {
  check_same(o);
  return FieldElement(field_, poly_mul_mod(coords_, o.coords_, field_->min_poly()));
}

FieldElement FieldElement::inverse() const {
  if (is_zero()) throw DomainError("division by zero in number field");
  const std::size_t d = coords_.size();
  RatMatrix m(d, d);
  RatVector e(d);
  for (std::size_t i = 0; i < d; ++i) {
    e.assign(d, Rat(0));
    e[i] = 1;
    RatVector row = poly_mul_mod(coords_, e, field_->min_poly());
    for (std::size_t j = 0; j < d; ++j) m(i, j) = row[j];
  }
  RatMatrix one(1, d);
  one(0, 0) = 1;
  auto y = solve_left(m, one);
  if (!y) throw DomainError("element is not invertible; is min_poly irreducible?");
  return FieldElement(field_, y->row_vector(0));
}

FieldElement FieldElement::operator/(const FieldElement& o) const {
  check_same(o);
  return *this * o.inverse();
}

Rat FieldElement::trace() const {
  IntVector ps = detail::power_sums(field_->min_poly(), coords_.size());
  Rat t = 0;
  for (std::size_t i = 0; i < coords_.size(); ++i) t += coords_[i] * ps[i];
  return t;
}

bool operator==(const FieldElement& a, const FieldElement& b) {
  if (a.coords_.size() != b.coords_.size()) return false;
  return a.coords_ == b.coords_;
}

std::string FieldElement::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (i) s += ",";
    s += "\"" + fixrank::to_string(coords_[i]) + "\"";
  }
  return s + "]";
}

// ---- norms and embeddings ----

NormPair trace_and_twisted_norm(const FieldElement& x) {
  RatVector z = x.basis_coords();
  Rat t = bilinear(z, to_rat(x.field()->trace_gram()), z);
  return {t, x.field()->norm_scale().value() * to_double(t)};
}

std::vector<double> minkowski_embed(const std::vector<FieldElement>& v) {
  if (v.empty()) return {};
  const NumberField& k = *v.front().field();
  const std::size_t d = k.degree();
  std::vector<double> out;
  out.reserve(v.size() * d);
  double exact = 0;
  for (const auto& x : v) {
    RatVector z = x.basis_coords();
    for (std::size_t c = 0; c < d; ++c) {
      double acc = 0;
      for (std::size_t j = 0; j < d; ++j) acc += to_double(z[j]) * k.embedding()(j, c);
      out.push_back(acc);
    }
    exact += trace_and_twisted_norm(x).twisted_sqnorm;
  }
  double got = 0;
  for (double c : out) got += c * c;
  if (std::abs(got - exact) > 1e-10 * std::max(1.0, exact))
    throw PrecisionError("embedded norm deviates from the exact twisted norm");
  return out;
}

std::vector<std::vector<FieldElement>> ok_z_basis(const std::vector<std::vector<FieldElement>>& vectors) {
  std::vector<std::vector<FieldElement>> out;
  for (const auto& v : vectors) {
    if (v.empty()) continue;
    const FieldPtr& k = v.front().field();
    for (int j = 0; j < k->degree(); ++j) {
      RatVector e(k->degree());
      e[j] = 1;
      FieldElement u = FieldElement::from_basis_coords(k, e);
      std::vector<FieldElement> w;
      w.reserve(v.size());
      for (const auto& x : v) w.push_back(u * x);
      out.push_back(std::move(w));
    }
  }
  return out;
}

// ---- degree-one primes ----

PrimeIdealData make_prime(const NumberField& field, std::uint64_t p, std::uint64_t root) {
  if (!is_prime(p)) throw ValidationError(std::to_string(p) + " is not prime");
  root %= p;
  std::uint64_t acc = 0;
  const auto& f = field.min_poly();
  for (std::size_t i = f.size(); i-- > 0;) acc = (mul_mod(acc, root, p) + mod_u64(f[i], p)) % p;
  if (acc != 0) throw ValidationError("root is not a zero of min_poly modulo p");
  if (mod_u64(field.index(), p) == 0) throw ValidationError("p divides the index [O_K : Z[theta]]");
  PrimeIdealData prime;
  prime.p = p;
  prime.root = root;
  prime.norm = p;
  const std::size_t d = field.degree();
  for (std::size_t j = 0; j < d; ++j) {
    std::uint64_t v = 0, pw = 1;
    for (std::size_t i = 0; i < d; ++i) {
      v = (v + mul_mod(mod_u64(field.integral_basis()(j, i), p), pw, p)) % p;
      pw = mul_mod(pw, root, p);
    }
    prime.basis_images.push_back(v);
  }
  return prime;
}

std::vector<PrimeIdealData> degree_one_primes(const NumberField& field, std::uint64_t p) {
  if (!is_prime(p)) throw ValidationError(std::to_string(p) + " is not prime");
  std::vector<PrimeIdealData> out;
  if (mod_u64(field.index(), p) == 0) return out;
  const auto& f = field.min_poly();
  for (std::uint64_t r = 0; r < p; ++r) {
    std::uint64_t acc = 0;
    for (std::size_t i = f.size(); i-- > 0;) acc = (mul_mod(acc, r, p) + mod_u64(f[i], p)) % p;
    if (acc == 0) out.push_back(make_prime(field, p, r));
  }
  return out;
}

std::uint64_t reduce_mod_prime(const IntVector& z, const PrimeIdealData& prime) {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < z.size(); ++j)
    v = (v + mul_mod(mod_u64(z[j], prime.p), prime.basis_images[j], prime.p)) % prime.p;
  return v;
}

std::uint64_t reduce_mod_prime(const FieldElement& x, const PrimeIdealData& prime) {
  RatVector z = x.basis_coords();
  IntVector zi;
  for (const auto& c : z) {
    if (!is_integral(c)) throw DomainError("cannot reduce a non-integral element");
    zi.push_back(c.get_num());
  }
  return reduce_mod_prime(zi, prime);
}

// ---- field specification files ----

FieldPtr parse_field_spec(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<IntVector> poly;
  std::optional<std::vector<Rat>> basis;
  int digits = 50;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim_ws(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("field spec line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim_ws(line.substr(0, eq));
    auto values = split_values(line.substr(eq + 1));
    if (key == "min_poly") {
      IntVector p;
      for (const auto& v : values) p.push_back(parse_int(v));
      poly = std::move(p);
    } else if (key == "integral_basis") {
      std::vector<Rat> b;
      for (const auto& v : values) b.push_back(parse_rat(v));
      basis = std::move(b);
    } else if (key == "precision_digits") {
      if (values.size() != 1) throw ValidationError("precision_digits takes one value");
      digits = std::stoi(values[0]);
    } else {
      throw ValidationError("field spec line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!poly) throw ValidationError("field spec is missing min_poly");
  std::optional<RatMatrix> b;
  if (basis) {
    const std::size_t d = poly->size() - 1;
    if (basis->size() != d * d)
      throw ValidationError("integral_basis needs " + std::to_string(d * d) + " entries");
    RatMatrix m(d, d);
    for (std::size_t i = 0; i < d * d; ++i) m(i / d, i % d) = (*basis)[i];
    b = std::move(m);
  }
  return NumberField::make(*poly, b, digits);
}

FieldPtr load_field_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open field spec '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_field_spec(buf.str());
}

FieldPtr field_preset(const std::string& name) {
  auto half = RatMatrix{{Rat(1), Rat(0)}, {Rat(1, 2), Rat(1, 2)}};
  if (name == "Q") return NumberField::rationals();
  if (name == "Q(i)") return NumberField::make({Int(1), Int(0), Int(1)});
  if (name == "Q(sqrt2)") return NumberField::make({Int(-2), Int(0), Int(1)});
  if (name == "Q(sqrt5)") return NumberField::make({Int(-5), Int(0), Int(1)}, half);
  if (name == "Q(sqrt-3)") return NumberField::make({Int(3), Int(0), Int(1)}, half);
  if (name == "Q(zeta5)") return NumberField::make({Int(1), Int(1), Int(1), Int(1), Int(1)});
  throw ValidationError("unknown field preset '" + name + "'");
}

}  // namespace fixrank
