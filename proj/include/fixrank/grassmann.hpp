#pragma once

#include <string>
#include <vector>

#include "fixrank/field_matrix.hpp"
#include "fixrank/lattice.hpp"

namespace fixrank {

/// Row-reduced echelon k x m matrix of rank k over K: the canonical point of Gr(k, K^m).
struct EchelonMatrix {
  FieldMatrix entries;
  std::vector<std::size_t> pivot_cols;

  std::size_t k() const { return entries.rows(); }
  std::size_t m() const { return entries.cols(); }
  std::string key() const { return entries.key(); }
  friend bool operator==(const EchelonMatrix& a, const EchelonMatrix& b) { return a.entries == b.entries; }
};

/// The primitive O_K-module of integral vectors in the row space of D.
struct PrimitiveModule {
  EchelonMatrix echelon;
  ZLattice lattice;  // rank k*d inside O_K^m, integral-basis coordinates
  Rat height_sq;     // H(D)^2, exact
  double height;
  Int denominator;
};

/// Throws ValidationError when rank(M) < rows(M).
EchelonMatrix to_echelon(const FieldMatrix& m);

/// Matrix of v -> vD from O_K^k (integral-basis coordinates) to K^m.
RatMatrix echelon_map(const EchelonMatrix& d);

PrimitiveModule lambda_of(const EchelonMatrix& d);
Int denominator(const EchelonMatrix& d);
/// H(D)^2 from the echelon form alone, without saturating.
Rat height_sq(const EchelonMatrix& d);

/// Recovers D from a primitive O_K-stable lattice in O_K^m.
EchelonMatrix echelon_of_module(const FieldPtr& field, const ZLattice& l);

/// Explicit constant in prod ||l_i||^d <= c * H for rank-k modules: 2^(r(r-1)/4), r = kd.
double minima_product_constant(std::size_t k, std::size_t d);

/// All primitive rank-k O_K-modules in O_K^m with H <= height_bound, sorted by (H, key).
std::vector<PrimitiveModule> enumerate_primitive_modules(const FieldPtr& field, std::size_t k, std::size_t m,
                                                         double height_bound);
std::size_t schmidt_count(const FieldPtr& field, std::size_t k, std::size_t m, double height_bound);

/// Elements of M_n(Lambda_D) with twisted Frobenius norm <= radius; each matrix has n rows
/// of integral-basis coordinates (length m*d).
std::vector<IntMatrix> matrices_with_rows(std::size_t n, const PrimitiveModule& p, double radius);

/// det(Gram Lambda_D) / det(Phi G Phi^T), which equals denominator(D)^2.
Rat jacobian_ratio(const PrimitiveModule& p);

/// [M_{n x k}(O_K) D : M_n(Lambda_D)] computed from elementary divisors.
Int row_index(const PrimitiveModule& p, std::size_t n);

/// JSON line with exact D entries, H as a decimal string and the denominator.
std::string module_json(const PrimitiveModule& p);

}  // namespace fixrank
