#pragma once

#include <string>
#include <vector>

#include "fixrank/numfield.hpp"

namespace fixrank {

/// Dense matrix over a number field.
class FieldMatrix {
 public:
  FieldMatrix() = default;
  FieldMatrix(FieldPtr field, std::size_t rows, std::size_t cols);

  static FieldMatrix from_rationals(FieldPtr field, const RatMatrix& m);
  /// Each row given in integral-basis coordinates, length cols * d.
  static FieldMatrix from_row_coords(FieldPtr field, const std::vector<RatVector>& rows, std::size_t cols);
  static FieldMatrix identity(FieldPtr field, std::size_t n);

  const FieldPtr& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  FieldElement& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const FieldElement& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  /// Row i in integral-basis coordinates.
  RatVector row_coords(std::size_t i) const;
  bool is_integral() const;
  bool is_zero() const;

  FieldMatrix operator*(const FieldMatrix& o) const;
  FieldMatrix transpose() const;

  friend bool operator==(const FieldMatrix& a, const FieldMatrix& b);

  /// Canonical text form: rows of entries, each entry its power-basis coordinates.
  std::string key() const;

 private:
  FieldPtr field_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<FieldElement> entries_;
};

/// Reduced row echelon form over K; pivots receive the pivot column of each nonzero row.
FieldMatrix rref_over_k(const FieldMatrix& a, std::vector<std::size_t>* pivots = nullptr);
std::size_t rank_over_k(const FieldMatrix& a);

}  // namespace fixrank
