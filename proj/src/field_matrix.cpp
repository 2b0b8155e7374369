#include "fixrank/field_matrix.hpp"

#include "fixrank/core/errors.hpp"

namespace fixrank {

FieldMatrix::FieldMatrix(FieldPtr field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols) {
  entries_.assign(rows * cols, FieldElement::from_rational(field_, 0));
}

FieldMatrix FieldMatrix::from_rationals(FieldPtr field, const RatMatrix& m) {
  FieldMatrix out(field, m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, j) = FieldElement::from_rational(field, m(i, j));
  return out;
}

FieldMatrix FieldMatrix::from_row_coords(FieldPtr field, const std::vector<RatVector>& rows, std::size_t cols) {
  const std::size_t d = field->degree();
  FieldMatrix out(field, rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols * d) throw ValidationError("row coordinate vector has wrong length");
    for (std::size_t j = 0; j < cols; ++j) {
      RatVector z(rows[i].begin() + static_cast<long>(j * d), rows[i].begin() + static_cast<long>((j + 1) * d));
      out.at(i, j) = FieldElement::from_basis_coords(field, z);
    }
  }
  return out;
}

FieldMatrix FieldMatrix::identity(FieldPtr field, std::size_t n) {
  FieldMatrix out(field, n, n);
  for (std::size_t i = 0; i < n; ++i) out.at(i, i) = FieldElement::from_rational(field, 1);
  return out;
}

RatVector FieldMatrix::row_coords(std::size_t i) const {
  RatVector out;
  out.reserve(cols_ * field_->degree());
  for (std::size_t j = 0; j < cols_; ++j) {
    RatVector z = at(i, j).basis_coords();
    out.insert(out.end(), z.begin(), z.end());
  }
  return out;
}

bool FieldMatrix::is_integral() const {
  for (const auto& e : entries_)
    if (!e.is_integral()) return false;
  return true;
}

bool FieldMatrix::is_zero() const {
  for (const auto& e : entries_)
    if (!e.is_zero()) return false;
  return true;
}

FieldMatrix FieldMatrix::operator*(const FieldMatrix& o) const {
  if (cols_ != o.rows_) throw ValidationError("field matrix product dimension mismatch");
  FieldMatrix out(field_, rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      if (at(i, k).is_zero()) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) out.at(i, j) = out.at(i, j) + at(i, k) * o.at(k, j);
    }
  return out;
}

FieldMatrix FieldMatrix::transpose() const {
  FieldMatrix out(field_, cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out.at(j, i) = at(i, j);
  return out;
}

bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i)
    if (a.entries_[i] != b.entries_[i]) return false;
  return true;
}

std::string FieldMatrix::key() const {
  std::string s = "[";
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i) s += ",";
    s += "[";
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) s += ",";
      s += at(i, j).to_string();
    }
    s += "]";
  }
  return s + "]";
}

FieldMatrix rref_over_k(const FieldMatrix& m, std::vector<std::size_t>* pivots) {
  FieldMatrix a = m;
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a.at(p, c).is_zero()) ++p;
    if (p == a.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a.at(p, j), a.at(r, j));
    FieldElement inv = a.at(r, c).inverse();
    for (std::size_t j = c; j < a.cols(); ++j) a.at(r, j) = a.at(r, j) * inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a.at(i, c).is_zero()) continue;
      FieldElement f = a.at(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) a.at(i, j) = a.at(i, j) - f * a.at(r, j);
    }
    piv.push_back(c);
    ++r;
  }
  if (pivots) *pivots = std::move(piv);
  return a;
}

std::size_t rank_over_k(const FieldMatrix& a) {
  std::vector<std::size_t> piv;
  rref_over_k(a, &piv);
  return piv.size();
}

}  // namespace fixrank
