#include <cstdlib>

#include "fixrank/lattice.hpp"

namespace fixrank {

namespace {

// rows (a, b) <- (s*a + t*b, x*a + y*b)
void combine_rows(IntMatrix& m, std::size_t a, std::size_t b, const Int& s, const Int& t, const Int& x,
                  const Int& y) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Int va = m(a, j), vb = m(b, j);
    m(a, j) = s * va + t * vb;
    m(b, j) = x * va + y * vb;
  }
}

void add_row_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const Int& q) {
  if (q == 0) return;
  for (std::size_t j = 0; j < m.cols(); ++j) m(dst, j) += q * m(src, j);
}

void add_col_multiple(IntMatrix& m, std::size_t dst, std::size_t src, const Int& q) {
  if (q == 0) return;
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, dst) += q * m(i, src);
}

void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  if (a == b) return;
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}

void negate_row(IntMatrix& m, std::size_t r) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(r, j) = -m(r, j);
}

Int fdiv(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

HnfResult hermite_normal_form(const IntMatrix& m) {
  IntMatrix h = m;
  IntMatrix u = IntMatrix::identity(m.rows());
  const std::size_t r = m.rows(), c = m.cols();
  std::size_t row = 0;
  for (std::size_t col = 0; col < c && row < r; ++col) {
    bool any = false;
    for (std::size_t i = row; i < r; ++i) any = any || h(i, col) != 0;
    if (!any) continue;
    for (std::size_t i = row + 1; i < r; ++i) {
      if (h(i, col) == 0) continue;
      Int a = h(row, col), b = h(i, col), s, t;
      Int g = xgcd(a, b, s, t);
      Int x = -b / g, y = a / g;
      combine_rows(h, row, i, s, t, x, y);
      combine_rows(u, row, i, s, t, x, y);
    }
    if (h(row, col) < 0) {
      negate_row(h, row);
      negate_row(u, row);
    }
    for (std::size_t i = 0; i < row; ++i) {
      Int q = fdiv(h(i, col), h(row, col));
      add_row_multiple(h, i, row, -q);
      add_row_multiple(u, i, row, -q);
    }
    ++row;
  }
  return {std::move(h), std::move(u), row};
}

SnfResult smith_normal_form(const IntMatrix& m) {
  IntMatrix a = m;
  const std::size_t r = m.rows(), c = m.cols();
  IntMatrix left = IntMatrix::identity(r), right = IntMatrix::identity(c);
  const std::size_t n = std::min(r, c);
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      std::size_t bi = r, bj = c;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < c; ++j)
          if (a(i, j) != 0 && (bi == r || abs(a(i, j)) < abs(a(bi, bj)))) {
            bi = i;
            bj = j;
          }
      if (bi == r) break;
      a.swap_rows(t, bi);
      left.swap_rows(t, bi);
      swap_cols(a, t, bj);
      swap_cols(right, t, bj);
      bool clear = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        Int q = fdiv(a(i, t), a(t, t));
        add_row_multiple(a, i, t, -q);
        add_row_multiple(left, i, t, -q);
        clear = clear && a(i, t) == 0;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        Int q = fdiv(a(t, j), a(t, t));
        add_col_multiple(a, j, t, -q);
        add_col_multiple(right, j, t, -q);
        clear = clear && a(t, j) == 0;
      }
      if (!clear) continue;
      bool divides = true;
      for (std::size_t i = t + 1; i < r && divides; ++i)
        for (std::size_t j = t + 1; j < c && divides; ++j)
          if (a(i, j) % a(t, t) != 0) {
            add_row_multiple(a, t, i, Int(1));
            add_row_multiple(left, t, i, Int(1));
            divides = false;
          }
      if (divides) break;
    }
    if (a(t, t) < 0) {
      negate_row(a, t);
      negate_row(left, t);
    }
  }
  IntVector diag(n);
  for (std::size_t t = 0; t < n; ++t) diag[t] = a(t, t);
  return {std::move(diag), std::move(left), std::move(right)};
}

IntMatrix left_kernel(const IntMatrix& m) {
  HnfResult res = hermite_normal_form(m);
  IntMatrix k(0, m.rows());
  for (std::size_t i = res.rank; i < m.rows(); ++i) k.append_row(res.u.row(i));
  if (k.rows() == 0) k = IntMatrix(0, m.rows());
  return k;
}

IntMatrix saturate_rows(const IntMatrix& m) {
  const std::size_t c = m.cols();
  IntMatrix right_kernel = left_kernel(m.transpose());
  IntMatrix sat;
  if (right_kernel.rows() == 0) {
    sat = IntMatrix::identity(c);
  } else {
    sat = left_kernel(right_kernel.transpose());
  }
  HnfResult h = hermite_normal_form(sat);
  return h.h.submatrix_rows(0, h.rank);
}

}  // namespace fixrank
