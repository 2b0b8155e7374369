#pragma once

#include <string>
#include <vector>

#include "fixrank/core/arith.hpp"
#include "fixrank/core/linalg.hpp"
#include "fixrank/core/scale.hpp"
#include "fixrank/numfield.hpp"

namespace fixrank {

// ---- integer normal forms ----

struct HnfResult {
  IntMatrix h;       // U * M, row-style Hermite form, zero rows last
  IntMatrix u;       // unimodular
  std::size_t rank;  // number of nonzero rows of h
};

HnfResult hermite_normal_form(const IntMatrix& m);

struct SnfResult {
  IntVector diagonal;  // d_1 | d_2 | ..., length min(rows, cols), zeros last
  IntMatrix left;      // left * M * right = diag
  IntMatrix right;
};

SnfResult smith_normal_form(const IntMatrix& m);

/// Basis (rows) of {x in Z^rows : x * m = 0}.
IntMatrix left_kernel(const IntMatrix& m);

/// Z-basis of (row span over Q) intersected with Z^cols, in Hermite form.
IntMatrix saturate_rows(const IntMatrix& m);

// ---- lattices ----

/// Bound on a twisted squared norm, exact.
struct SquaredBound {
  Rat value;
  static SquaredBound from_radius(double radius);
};

/// Rank-r lattice spanned by the rows of `basis` inside Q^N, where Q^N carries the exact
/// quadratic form `ambient_form`, and lengths are measured after multiplying that form by
/// `scale_sq`. For O_K-modules N = m*d in integral-basis coordinates, the form is the
/// block trace form and scale_sq = |disc|^(-1/d).
class ZLattice {
 public:
  ZLattice() = default;
  ZLattice(RatMatrix basis, RatMatrix ambient_form, ScaleFactor scale_sq = {});

  static ZLattice standard(std::size_t n);
  /// O_K^m in integral-basis coordinates.
  static ZLattice ok_power(const NumberField& field, std::size_t m);
  static ZLattice from_int_basis(const IntMatrix& basis, const RatMatrix& ambient_form,
                                 ScaleFactor scale_sq = {});

  std::size_t rank() const noexcept { return basis_.rows(); }
  std::size_t ambient_dim() const noexcept { return basis_.cols(); }
  const RatMatrix& basis() const noexcept { return basis_; }
  const RatMatrix& ambient_form() const noexcept { return form_; }
  const RatMatrix& gram() const noexcept { return gram_; }
  const ScaleFactor& scale_sq() const noexcept { return scale_sq_; }
  bool integral_basis() const;
  IntMatrix int_basis() const;

  /// det(gram), the exact radicand before scaling.
  const Rat& gram_det() const noexcept { return gram_det_; }
  /// scale_sq^r * det(gram).
  ScaleFactor height_sq() const;
  double height() const;
  double log_height() const;

  /// Untwisted squared length of the lattice vector with the given basis coordinates.
  Rat coord_sq_norm(const IntVector& coords) const;
  /// Untwisted squared length of an ambient vector.
  Rat ambient_sq_norm(const RatVector& v) const;
  double twisted_norm(const Rat& untwisted_sq) const;

  RatVector ambient_vector(const IntVector& coords) const;
  /// Coordinates of an ambient vector in this basis, if it lies in the lattice.
  std::optional<IntVector> coordinates_of(const RatVector& v) const;
  bool contains(const RatVector& v) const { return coordinates_of(v).has_value(); }

  ZLattice with_basis(RatMatrix basis) const;
  ZLattice with_scale(ScaleFactor scale_sq) const;

  /// JSON with basis, gram, scale_sq_num, scale_sq_den_pow, rank, ambient_dim.
  std::string to_json() const;

 private:
  RatMatrix basis_;
  RatMatrix form_;
  RatMatrix gram_;
  ScaleFactor scale_sq_;
  Rat gram_det_{1};
  IntMatrix int_gram_;  // gram * gram_den_
  Int gram_den_{1};
};

/// n-fold orthogonal sum, e.g. M_n(L) for a row module L.
ZLattice orthogonal_power(const ZLattice& l, std::size_t n);

struct LllResult {
  ZLattice lattice;
  IntMatrix transform;  // new basis = transform * old basis
};

LllResult lll_reduce(const ZLattice& l, const Rat& delta = Rat(99, 100));
/// LLL on a Gram matrix alone; returns U with U * gram * U^T reduced.
IntMatrix lll_gram(const RatMatrix& gram, const Rat& delta = Rat(99, 100));

/// Global cap on the predicted number of enumerated points.
void set_enumeration_cap(double max_points);
double enumeration_cap();

struct LatticePoint {
  IntVector coords;  // in the lattice basis
  Rat sq_norm;       // untwisted
};

/// Every lattice vector with twisted squared norm <= bound (zero included), in
/// lexicographic order of coordinates. Throws CapExceeded when the volume estimate
/// exceeds enumeration_cap().
std::vector<LatticePoint> short_vectors_with_norms(const ZLattice& l, const SquaredBound& bound);
std::vector<IntVector> short_vectors(const ZLattice& l, double radius);
/// Same enumeration for a bound on the untwisted form value.
std::vector<LatticePoint> short_vectors_untwisted(const ZLattice& l, const Rat& qbound);

/// Predicted point count 2 * V(r) * (R + rho)^r / H.
double ball_count_estimate(const ZLattice& l, double radius);

/// Saturation of sub inside ambient, returned with a basis of ambient coordinates.
ZLattice saturate(const ZLattice& sub, const ZLattice& ambient);
/// [saturate(sub) : sub].
Int saturation_index(const ZLattice& sub, const ZLattice& ambient);

/// Half the sum of the basis norms of an LLL-reduced basis.
double covering_radius_bound(const ZLattice& l);

double hadamard_ratio(const ZLattice& l);

/// Unit-ball volume V(s).
double ball_volume(double s);

/// Explicit first-minimum constant: ||l_1|| <= 2^(r/2) H^(1/r).
double minkowski_constant(std::size_t r);

// ---- O_K-modules ----

/// x * u_t, applied blockwise to a vector of O_K^m in integral-basis coordinates.
IntVector multiply_by_basis(const NumberField& field, const IntVector& v, std::size_t t);
RatVector multiply_by_basis(const NumberField& field, const RatVector& v, std::size_t t);

/// Rank over K of vectors of K^m given in integral-basis coordinates.
std::size_t k_rank(const NumberField& field, const std::vector<RatVector>& vectors);

bool is_ok_stable(const NumberField& field, const ZLattice& l);

struct MinimaReport {
  std::vector<RatVector> vectors;  // ambient coordinates
  std::vector<Rat> sq_norms;       // untwisted
  std::vector<double> norms;       // twisted
  std::vector<bool> projections_ok;  // pairs (i<j) in row-major order
};

/// Successive K-minima of an O_K-module of O_K-rank k. Equal norms are broken
/// toward the lexicographically largest ambient coordinate vector.
MinimaReport successive_k_minima(const NumberField& field, const ZLattice& module, std::size_t k);

/// Twisted norm of the orthogonal projection of x onto K_R * y.
double projection_norm(const NumberField& field, const ZLattice& ambient_shape, const RatVector& x,
                       const RatVector& y);

}  // namespace fixrank
