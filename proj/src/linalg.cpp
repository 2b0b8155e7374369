#include "fixrank/core/linalg.hpp"

#include <stdexcept>

#include "fixrank/core/errors.hpp"

namespace fixrank {

RatMatrix to_rat(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = Rat(m(i, j));
  return r;
}

IntMatrix to_int(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_integral(m(i, j))) throw DomainError("matrix entry " + to_string(m(i, j)) + " is not integral");
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

RatVector to_rat(const IntVector& v) {
  RatVector r;
  r.reserve(v.size());
  for (const auto& x : v) r.emplace_back(x);
  return r;
}

Int common_denominator(const RatMatrix& m) {
  Int l = 1;
  for (const auto& x : m.data()) l = lcm(l, x.get_den());
  return l;
}

Int common_denominator(const RatVector& v) {
  Int l = 1;
  for (const auto& x : v) l = lcm(l, x.get_den());
  return l;
}

Rat determinant(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  RatMatrix a = m;
  const std::size_t n = a.rows();
  Rat det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) return 0;
    if (p != c) {
      a.swap_rows(p, c);
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      if (a(r, c) == 0) continue;
      Rat f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

Int determinant(const IntMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  IntMatrix a = m;
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  Int sign = 1;
  Int prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(p, k);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Int v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = v;
      }
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

RatMatrix rref(const RatMatrix& m, std::vector<std::size_t>* pivots) {
  RatMatrix a = m;
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(p, r);
    Rat inv = 1 / a(r, c);
    for (std::size_t j = c; j < a.cols(); ++j) a(r, j) *= inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      if (i == r || a(i, c) == 0) continue;
      Rat f = a(i, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    piv.push_back(c);
    ++r;
  }
  if (pivots) *pivots = std::move(piv);
  return a;
}

std::size_t rank(const RatMatrix& m) {
  std::vector<std::size_t> piv;
  rref(m, &piv);
  return piv.size();
}

std::optional<RatMatrix> inverse(const RatMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = m.rows();
  RatMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
    aug(i, n + i) = 1;
  }
  std::vector<std::size_t> piv;
  RatMatrix red = rref(aug, &piv);
  if (piv.size() < n || piv[n - 1] >= n) return std::nullopt;
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = red(i, n + j);
  return inv;
}

std::optional<RatMatrix> solve_left(const RatMatrix& a, const RatMatrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("solve_left dimension mismatch");
  // X a = b  <=>  a^T X^T = b^T.
  const std::size_t n = a.cols(), r = a.rows(), k = b.rows();
  RatMatrix aug(n, r + k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < r; ++j) aug(i, j) = a(j, i);
    for (std::size_t j = 0; j < k; ++j) aug(i, r + j) = b(j, i);
  }
  std::vector<std::size_t> piv;
  RatMatrix red = rref(aug, &piv);
  for (std::size_t p : piv)
    if (p >= r) return std::nullopt;
  if (piv.size() != r) throw std::invalid_argument("solve_left: rows of a are dependent");
  RatMatrix x(k, r);
  for (std::size_t i = 0; i < piv.size(); ++i)
    for (std::size_t j = 0; j < k; ++j) x(j, piv[i]) = red(i, r + j);
  return x;
}

bool ldl_decompose(const RatMatrix& gram, RatMatrix& lower, RatVector& diag) {
  const std::size_t n = gram.rows();
  lower = RatMatrix::identity(n);
  diag.assign(n, Rat(0));
  for (std::size_t j = 0; j < n; ++j) {
    Rat d = gram(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= lower(j, k) * lower(j, k) * diag[k];
    diag[j] = d;
    if (d == 0) return false;
    for (std::size_t i = j + 1; i < n; ++i) {
      Rat s = gram(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k) * diag[k];
      lower(i, j) = s / d;
    }
  }
  return true;
}

bool is_positive_definite(const RatMatrix& gram) {
  if (gram.rows() != gram.cols()) return false;
  for (std::size_t i = 0; i < gram.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (gram(i, j) != gram(j, i)) return false;
  RatMatrix l;
  RatVector d;
  if (!ldl_decompose(gram, l, d)) return false;
  for (const auto& x : d)
    if (x <= 0) return false;
  return true;
}

Rat bilinear(const RatVector& v, const RatMatrix& form, const RatVector& w) {
  Rat s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Rat t = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (w[j] != 0) t += form(i, j) * w[j];
    s += v[i] * t;
  }
  return s;
}

Int bilinear(const IntVector& v, const IntMatrix& form, const IntVector& w) {
  Int s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Int t = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (w[j] != 0) t += form(i, j) * w[j];
    s += v[i] * t;
  }
  return s;
}

}  // namespace fixrank
