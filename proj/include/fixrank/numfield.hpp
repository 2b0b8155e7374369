#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fixrank/core/arith.hpp"
#include "fixrank/core/linalg.hpp"
#include "fixrank/core/scale.hpp"

namespace fixrank {

class NumberField;
using FieldPtr = std::shared_ptr<const NumberField>;

/// Degree-d number field K = Q[x]/(f) together with a fixed Z-basis u_1..u_d of O_K.
///
/// Vectors over O_K are carried everywhere else in integral-basis coordinates: an element
/// of O_K^m is an integer vector of length m*d, block i holding the coordinates of entry i.
/// In those coordinates the (untwisted) trace form Tr(x conj(x)) is the integer Gram
/// matrix trace_gram(), and the twisted squared norm is norm_scale() times it.
class NumberField {
 public:
  struct Signature {
    int real = 0;
    int complex = 0;
  };

  /// min_poly lists integer coefficients, constant term first, and must be monic.
  /// Without an integral basis the power basis is used.
  static FieldPtr make(const IntVector& min_poly,
                       const std::optional<RatMatrix>& integral_basis = std::nullopt,
                       int precision_digits = 50);

  static FieldPtr rationals();

  int degree() const noexcept { return degree_; }
  Signature signature() const noexcept { return signature_; }
  const IntVector& min_poly() const noexcept { return min_poly_; }
  const RatMatrix& integral_basis() const noexcept { return basis_; }
  const Int& discriminant() const noexcept { return discriminant_; }
  /// [O_K : Z[theta]].
  const Int& index() const noexcept { return index_; }
  int precision_digits() const noexcept { return precision_digits_; }
  bool irreducibility_checked() const noexcept { return irreducibility_checked_; }
  bool is_rationals() const noexcept { return degree_ == 1; }

  /// Tr(u_i conj(u_j)); symmetric positive definite.
  const IntMatrix& trace_gram() const noexcept { return trace_gram_; }
  /// Tr(u_i u_j); its determinant is the discriminant.
  const IntMatrix& trace_form() const noexcept { return trace_form_; }
  /// |disc|^(-1/d), the factor turning the trace form into the unit-covolume norm.
  const ScaleFactor& norm_scale() const noexcept { return norm_scale_; }

  /// Multiplication by u_j in integral-basis coordinates: coords(x*u_j) = coords(x) * M_j.
  const std::vector<IntMatrix>& mult_matrices() const noexcept { return mult_; }
  /// Multiplication by an element given by integral-basis coordinates (rational allowed).
  RatMatrix mult_matrix(const RatVector& basis_coords) const;

  RatVector to_basis_coords(const RatVector& power_coords) const;
  RatVector to_power_coords(const RatVector& basis_coords) const;

  /// Complex roots of min_poly: real roots ascending, then one root per conjugate
  /// pair (positive imaginary part), ordered by real part.
  const std::vector<std::complex<double>>& roots() const noexcept { return roots_; }

  /// Row j is the scaled Minkowski embedding of u_j; x with integral-basis
  /// coordinates z embeds as z * embedding().
  const Matrix<double>& embedding() const noexcept { return embedding_; }

  /// Hash of the minimal polynomial and basis, for run manifests.
  std::string fingerprint() const;
  std::string describe() const;

  friend bool operator==(const NumberField& a, const NumberField& b);

 private:
  NumberField() = default;

  int degree_ = 1;
  Signature signature_{1, 0};
  IntVector min_poly_;
  RatMatrix basis_;
  RatMatrix basis_inverse_;
  Int discriminant_{1};
  Int index_{1};
  int precision_digits_ = 50;
  bool irreducibility_checked_ = true;
  IntMatrix trace_gram_;
  IntMatrix trace_form_;
  ScaleFactor norm_scale_;
  std::vector<IntMatrix> mult_;
  std::vector<std::complex<double>> roots_;
  Matrix<double> embedding_;
};

/// Element of K in power-basis coordinates.
class FieldElement {
 public:
  FieldElement() = default;
  FieldElement(FieldPtr field, RatVector power_coords);

  static FieldElement from_rational(FieldPtr field, const Rat& value);
  static FieldElement from_basis_coords(FieldPtr field, const RatVector& basis_coords);
  /// theta, the class of x.
  static FieldElement generator(FieldPtr field);

  const FieldPtr& field() const noexcept { return field_; }
  const RatVector& coords() const noexcept { return coords_; }
  RatVector basis_coords() const;

  bool is_zero() const;
  bool is_integral() const;

  FieldElement operator+(const FieldElement& o) const;
  FieldElement operator-(const FieldElement& o) const;
  FieldElement operator-() const;
  FieldElement operator*(const FieldElement& o) const;
  FieldElement operator/(const FieldElement& o) const;
  FieldElement inverse() const;

  Rat trace() const;

  friend bool operator==(const FieldElement& a, const FieldElement& b);
  friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

  std::string to_string() const;

 private:
  void check_same(const FieldElement& o) const;

  FieldPtr field_;
  RatVector coords_;
};

struct NormPair {
  Rat trace_form_value;    // Tr(x conj(x))
  double twisted_sqnorm;   // norm_scale * trace_form_value
};

NormPair trace_and_twisted_norm(const FieldElement& x);

/// Scaled Minkowski embedding of a vector over K into R^(r*d). Throws PrecisionError
/// if the embedded squared norm disagrees with the exact twisted norm.
std::vector<double> minkowski_embed(const std::vector<FieldElement>& v);

/// Z-basis {u_j * v_i} of the O_K-span of the given vectors, i-major.
std::vector<std::vector<FieldElement>> ok_z_basis(const std::vector<std::vector<FieldElement>>& vectors);

/// A prime of residue degree one: (p, theta - root).
struct PrimeIdealData {
  std::uint64_t p = 2;
  std::uint64_t root = 0;
  int residue_degree = 1;
  std::uint64_t norm = 2;
  /// Image of u_j in F_p.
  std::vector<std::uint64_t> basis_images;
};

PrimeIdealData make_prime(const NumberField& field, std::uint64_t p, std::uint64_t root);
/// All degree-one primes above p that avoid the index, ordered by root.
std::vector<PrimeIdealData> degree_one_primes(const NumberField& field, std::uint64_t p);

std::uint64_t reduce_mod_prime(const IntVector& basis_coords, const PrimeIdealData& prime);
std::uint64_t reduce_mod_prime(const FieldElement& x, const PrimeIdealData& prime);

/// Parses "key = value" lines: min_poly, integral_basis, precision_digits; '#' comments.
FieldPtr parse_field_spec(const std::string& text);
FieldPtr load_field_spec(const std::string& path);
/// "Q", "Q(i)", "Q(sqrt5)", "Q(sqrt-3)", "Q(sqrt2)", "Q(zeta5)".
FieldPtr field_preset(const std::string& name);

namespace detail {
/// Number of distinct real roots via an exact Sturm sequence.
int count_real_roots(const IntVector& poly);
/// Decides reducibility over Q for degree <= 4; nullopt above.
std::optional<bool> is_irreducible_small(const IntVector& poly);
/// Power sums Tr(theta^k) for k = 0..count-1.
IntVector power_sums(const IntVector& monic_poly, std::size_t count);
}  // namespace detail

}  // namespace fixrank
