#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixrank/core/errors.hpp"
#include "fixrank/lattice.hpp"

using namespace fixrank;

namespace {

IntMatrix imat(std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<std::vector<Int>> r;
  for (const auto& row : rows) {
    std::vector<Int> v;
    for (long x : row) v.emplace_back(x);
    r.push_back(v);
  }
  return IntMatrix::from_rows(r, r.empty() ? 0 : r.front().size());
}

ZLattice plane_lattice(std::initializer_list<std::initializer_list<long>> rows) {
  IntMatrix b = imat(rows);
  return ZLattice::from_int_basis(b, RatMatrix::identity(b.cols()));
}

bool is_hnf(const IntMatrix& h, std::size_t rank) {
  std::size_t last_pivot = 0;
  for (std::size_t i = 0; i < h.rows(); ++i) {
    std::size_t p = 0;
    while (p < h.cols() && h(i, p) == 0) ++p;
    if (i >= rank) {
      if (p != h.cols()) return false;
      continue;
    }
    if (p == h.cols() || h(i, p) <= 0) return false;
    if (i > 0 && p <= last_pivot) return false;
    for (std::size_t k = 0; k < i; ++k)
      if (h(k, p) < 0 || h(k, p) >= h(i, p)) return false;
    last_pivot = p;
  }
  return true;
}

}  // namespace

TEST(Height, Examples) {
  EXPECT_DOUBLE_EQ(ZLattice::standard(2).height(), 1.0);
  EXPECT_NEAR(plane_lattice({{2, 0}, {0, 3}}).height(), 6.0, 1e-12);
  auto l = plane_lattice({{2, 1}});
  EXPECT_EQ(l.gram_det(), 5);
  EXPECT_NEAR(l.height(), std::sqrt(5.0), 1e-12);
}

TEST(Hnf, Examples) {
  auto id = hermite_normal_form(IntMatrix::identity(3));
  EXPECT_EQ(id.h, IntMatrix::identity(3));
  EXPECT_EQ(id.u, IntMatrix::identity(3));

  IntMatrix m = imat({{2, 4}, {1, 3}});
  auto r = hermite_normal_form(m);
  EXPECT_EQ(r.h, imat({{1, 1}, {0, 2}}));
  EXPECT_EQ(r.u * m, r.h);
  EXPECT_EQ(abs(determinant(r.u)), 1);

  auto z = hermite_normal_form(imat({{0, 0}, {3, 6}}));
  EXPECT_EQ(z.h, imat({{3, 6}, {0, 0}}));
  EXPECT_EQ(z.rank, 1u);
}

TEST(Hnf, RandomMatricesProperties) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> e(-6, 6);
  for (int t = 0; t < 200; ++t) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = e(rng);
    auto res = hermite_normal_form(m);
    EXPECT_EQ(res.u * m, res.h);
    EXPECT_EQ(abs(determinant(res.u)), 1);
    EXPECT_TRUE(is_hnf(res.h, res.rank));
    EXPECT_EQ(res.rank, rank(to_rat(m)));
  }
}

TEST(Snf, Examples) {
  EXPECT_EQ(smith_normal_form(imat({{2, 0}, {0, 3}})).diagonal, (IntVector{Int(1), Int(6)}));
  EXPECT_EQ(smith_normal_form(IntMatrix::identity(2)).diagonal, (IntVector{Int(1), Int(1)}));
  EXPECT_EQ(smith_normal_form(imat({{2, 0}, {0, 2}})).diagonal, (IntVector{Int(2), Int(2)}));
}

TEST(Snf, RandomMatricesProperties) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long> e(-9, 9);
  for (int t = 0; t < 200; ++t) {
    std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) m(i, j) = e(rng);
    auto s = smith_normal_form(m);
    IntMatrix d = s.left * m * s.right;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j)
        EXPECT_EQ(d(i, j), (i == j ? s.diagonal[i] : Int(0)));
    EXPECT_EQ(abs(determinant(s.left)), 1);
    EXPECT_EQ(abs(determinant(s.right)), 1);
    for (std::size_t i = 0; i + 1 < s.diagonal.size(); ++i) {
      EXPECT_GE(s.diagonal[i], 0);
      if (s.diagonal[i] != 0)
        EXPECT_EQ(s.diagonal[i + 1] % s.diagonal[i], 0);
      else
        EXPECT_EQ(s.diagonal[i + 1], 0);
    }
    if (r == c) {
      Int prod = 1;
      for (const auto& x : s.diagonal) prod *= x;
      EXPECT_EQ(prod, abs(determinant(m)));
    }
  }
}

TEST(Lll, Examples) {
  auto orth = lll_reduce(plane_lattice({{2, 0}, {0, 3}}));
  EXPECT_EQ(orth.lattice.gram(), (RatMatrix{{Rat(4), Rat(0)}, {Rat(0), Rat(9)}}));

  auto skew = lll_reduce(plane_lattice({{1, 0}, {10, 1}}));
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(skew.lattice.gram()(i, i), 4);
  EXPECT_EQ(abs(determinant(skew.transform)), 1);
}

TEST(Lll, HadamardRatioDoesNotIncrease) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<long> e(-20, 20);
  int done = 0;
  while (done < 50) {
    std::size_t r = 2 + rng() % 3;
    IntMatrix b(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) b(i, j) = e(rng);
    if (determinant(b) == 0) continue;
    auto l = ZLattice::from_int_basis(b, RatMatrix::identity(r));
    auto red = lll_reduce(l);
    EXPECT_LE(hadamard_ratio(red.lattice), hadamard_ratio(l) * (1 + 1e-12));
    EXPECT_EQ(red.lattice.gram_det(), l.gram_det());
    ++done;
  }
}

TEST(ShortVectors, Examples) {
  auto z2 = ZLattice::standard(2);
  EXPECT_EQ(short_vectors(z2, 1.0).size(), 5u);
  EXPECT_EQ(short_vectors(z2, 2.0).size(), 13u);
  auto k = field_preset("Q(i)");
  auto pts = short_vectors(ZLattice::ok_power(*k, 1), 1.0);
  EXPECT_EQ(pts.size(), 5u);
  auto v = short_vectors(z2, 1.0);
  EXPECT_EQ(v.front(), (IntVector{Int(-1), Int(0)}));
  EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
}

TEST(ShortVectors, MatchBoxBruteForce) {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long> e(-5, 5);
  int done = 0;
  while (done < 20) {
    std::size_t r = 1 + rng() % 3;
    IntMatrix b(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) b(i, j) = e(rng);
    if (determinant(b) == 0) continue;
    auto l = ZLattice::from_int_basis(b, RatMatrix::identity(r));
    double radius = 3.0 + static_cast<double>(rng() % 5);
    auto got = short_vectors(l, radius);
    // Coordinates of points in the ball are bounded by radius * ||b^{-1}|| rows.
    auto inv = *inverse(to_rat(b));
    double bound = 0;
    for (std::size_t j = 0; j < r; ++j) {
      double col = 0;
      for (std::size_t i = 0; i < r; ++i) col += to_double(inv(i, j)) * to_double(inv(i, j));
      bound = std::max(bound, std::sqrt(col));
    }
    long box = static_cast<long>(std::ceil(radius * bound * std::sqrt(static_cast<double>(r)))) + 1;
    std::vector<IntVector> brute;
    IntVector x(r);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == r) {
        if (l.coord_sq_norm(x) <= Rat(static_cast<long>(radius * radius))) brute.push_back(x);
        return;
      }
      for (long c = -box; c <= box; ++c) {
        x[i] = c;
        rec(i + 1);
      }
    };
    rec(0);
    std::sort(brute.begin(), brute.end());
    EXPECT_EQ(got, brute);
    ++done;
  }
}

TEST(ShortVectors, BallCountBound) {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<long> e(-4, 4);
  int done = 0;
  while (done < 20) {
    std::size_t r = 2 + rng() % 2;
    IntMatrix b(r, r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) b(i, j) = e(rng);
    if (determinant(b) == 0) continue;
    auto l = ZLattice::from_int_basis(b, RatMatrix::identity(r));
    for (double t : {1.0, 3.0, 6.0}) {
      double count = static_cast<double>(short_vectors(l, t).size());
      double bound = 2 * ball_volume(static_cast<double>(r)) * std::pow(t + covering_radius_bound(l), r) / l.height();
      EXPECT_LE(count, bound);
    }
    ++done;
  }
}

TEST(ShortVectors, CapAborts) {
  double old = enumeration_cap();
  set_enumeration_cap(100);
  EXPECT_THROW(short_vectors(ZLattice::standard(4), 10.0), CapExceeded);
  set_enumeration_cap(old);
}

TEST(Saturate, Examples) {
  auto z2 = ZLattice::standard(2);
  auto s1 = saturate(plane_lattice({{2, 0}}), z2);
  EXPECT_EQ(s1.basis(), (RatMatrix{{Rat(1), Rat(0)}}));
  auto s2 = saturate(plane_lattice({{2, 4}}), z2);
  EXPECT_EQ(s2.basis(), (RatMatrix{{Rat(1), Rat(2)}}));
  EXPECT_EQ(saturation_index(plane_lattice({{2, 4}}), z2), 2);
  auto s3 = saturate(plane_lattice({{1, 2}}), z2);
  EXPECT_EQ(s3.basis(), (RatMatrix{{Rat(1), Rat(2)}}));
  EXPECT_THROW(saturate(ZLattice(RatMatrix{{Rat(1, 2), Rat(0)}}, RatMatrix::identity(2)), z2), ValidationError);
}

TEST(Saturate, IdempotentOnRandomSublattices) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> e(-6, 6);
  auto amb = ZLattice::standard(4);
  for (int t = 0; t < 50; ++t) {
    std::size_t s = 1 + rng() % 3;
    IntMatrix b(s, 4);
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = 0; j < 4; ++j) b(i, j) = e(rng);
    if (rank(to_rat(b)) < s) continue;
    auto sub = ZLattice::from_int_basis(b, RatMatrix::identity(4));
    auto once = saturate(sub, amb);
    auto twice = saturate(once, amb);
    EXPECT_EQ(once.basis(), twice.basis());
    EXPECT_GE(saturation_index(sub, amb), 1);
    EXPECT_EQ(saturation_index(once, amb), 1);
    EXPECT_EQ(Rat(sub.gram_det() / once.gram_det()),
              Rat(saturation_index(sub, amb) * saturation_index(sub, amb)));
  }
}

TEST(CoveringRadius, Examples) {
  EXPECT_DOUBLE_EQ(covering_radius_bound(ZLattice::standard(1)), 0.5);
  EXPECT_LE(covering_radius_bound(ZLattice::standard(2)), 1.0 + 1e-12);
  EXPECT_GE(covering_radius_bound(ZLattice::standard(2)), std::sqrt(0.5));
  EXPECT_LE(covering_radius_bound(plane_lattice({{1, 0}, {0, 10}})), 5.5 + 1e-12);
}

TEST(Hadamard, Examples) {
  EXPECT_NEAR(hadamard_ratio(ZLattice::standard(3)), 1.0, 1e-12);
  EXPECT_NEAR(hadamard_ratio(plane_lattice({{1, 0}, {1, 1}})), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(hadamard_ratio(plane_lattice({{2, 0}, {0, 3}})), 1.0, 1e-12);
}

TEST(SuccessiveMinima, Examples) {
  auto q = NumberField::rationals();
  auto a = successive_k_minima(*q, ZLattice::standard(2), 2);
  ASSERT_EQ(a.vectors.size(), 2u);
  EXPECT_EQ(a.vectors[0], (RatVector{Rat(1), Rat(0)}));
  EXPECT_EQ(a.vectors[1], (RatVector{Rat(0), Rat(1)}));

  auto b = successive_k_minima(*q, plane_lattice({{1, 0}, {10, 1}}), 2);
  EXPECT_EQ(b.vectors[0], (RatVector{Rat(1), Rat(0)}));
  EXPECT_EQ(b.vectors[1], (RatVector{Rat(0), Rat(1)}));

  auto k = field_preset("Q(i)");
  auto c = successive_k_minima(*k, ZLattice::ok_power(*k, 1), 1);
  EXPECT_NEAR(c.norms[0], 1.0, 1e-12);

  EXPECT_THROW(successive_k_minima(*q, plane_lattice({{1, 0}}), 2), ValidationError);
  auto half = ZLattice::from_int_basis(imat({{1, 0}}), to_rat(k->trace_gram()), k->norm_scale());
  EXPECT_THROW(successive_k_minima(*k, half, 1), ValidationError);
}

TEST(SuccessiveMinima, ProjectionAndMinkowskiBounds) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<long> e(-7, 7);
  for (const char* name : {"Q", "Q(i)", "Q(sqrt5)"}) {
    auto k = field_preset(name);
    const std::size_t d = k->degree();
    int done = 0;
    while (done < 10) {
      // O_K-span of two random vectors in O_K^3.
      std::vector<IntVector> gens;
      for (int g = 0; g < 2; ++g) {
        IntVector v(3 * d);
        for (auto& x : v) x = e(rng);
        gens.push_back(v);
      }
      IntMatrix zb(0, 3 * d);
      for (const auto& g : gens)
        for (std::size_t t = 0; t < d; ++t) zb.append_row(multiply_by_basis(*k, g, t));
      auto h = hermite_normal_form(zb);
      if (h.rank != 2 * d) continue;
      auto amb = ZLattice::ok_power(*k, 3);
      auto mod = amb.with_basis(to_rat(h.h.submatrix_rows(0, h.rank)));
      auto rep = successive_k_minima(*k, mod, 2);
      for (bool ok : rep.projections_ok) EXPECT_TRUE(ok);
      EXPECT_LE(rep.norms[0], rep.norms[1]);
      std::size_t r = mod.rank();
      EXPECT_LE(rep.norms[0], minkowski_constant(r) * std::pow(mod.height(), 1.0 / static_cast<double>(r)));
      ++done;
    }
  }
}

TEST(LatticeJson, HasFields) {
  auto k = field_preset("Q(sqrt5)");
  std::string j = ZLattice::ok_power(*k, 1).to_json();
  for (const char* key : {"\"basis\"", "\"gram\"", "\"scale_sq_num\"", "\"scale_sq_den_pow\"", "\"rank\"", "\"ambient_dim\""})
    EXPECT_NE(j.find(key), std::string::npos) << key;
  EXPECT_NE(j.find("\"-1/2\""), std::string::npos);
}

TEST(UnitCovolume, OkPowersHaveHeightOne) {
  for (const char* name : {"Q", "Q(i)", "Q(sqrt5)", "Q(zeta5)"}) {
    auto k = field_preset(name);
    for (std::size_t r = 1; r <= 3; ++r) {
      auto l = ZLattice::ok_power(*k, r);
      auto exact = l.height_sq().exact();
      ASSERT_TRUE(exact.has_value()) << name;
      EXPECT_EQ(*exact, 1);
    }
  }
}
