#pragma once

#include <optional>
#include <vector>

#include "fixrank/core/arith.hpp"
#include "fixrank/core/matrix.hpp"

namespace fixrank {

using IntMatrix = Matrix<Int>;
using RatMatrix = Matrix<Rat>;

RatMatrix to_rat(const IntMatrix& m);
/// Throws DomainError if some entry is not an integer.
IntMatrix to_int(const RatMatrix& m);
RatVector to_rat(const IntVector& v);

/// Least common multiple of all entry denominators.
Int common_denominator(const RatMatrix& m);
Int common_denominator(const RatVector& v);

Rat determinant(const RatMatrix& m);
/// Fraction-free (Bareiss) determinant.
Int determinant(const IntMatrix& m);

std::size_t rank(const RatMatrix& m);

/// Reduced row echelon form; `pivots` receives the pivot column of each nonzero row.
RatMatrix rref(const RatMatrix& m, std::vector<std::size_t>* pivots = nullptr);

std::optional<RatMatrix> inverse(const RatMatrix& m);

/// Solves X * a = b for X when a has independent rows; empty if inconsistent.
std::optional<RatMatrix> solve_left(const RatMatrix& a, const RatMatrix& b);

/// Exact LDL^T of a symmetric matrix: gram = L * diag(d) * L^T, L unit lower triangular.
/// Returns false (leaving outputs partial) if a pivot vanishes.
bool ldl_decompose(const RatMatrix& gram, RatMatrix& lower, RatVector& diag);

bool is_positive_definite(const RatMatrix& gram);

/// v * form * w^T for row vectors.
Rat bilinear(const RatVector& v, const RatMatrix& form, const RatVector& w);
Int bilinear(const IntVector& v, const IntMatrix& form, const IntVector& w);

}  // namespace fixrank
