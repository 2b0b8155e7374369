#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixrank/core/errors.hpp"
#include "fixrank/numfield.hpp"

using namespace fixrank;

namespace {

FieldElement elt(const FieldPtr& k, std::initializer_list<long> power_coords) {
  RatVector c;
  for (long x : power_coords) c.emplace_back(x);
  return FieldElement(k, c);
}

double covolume(const Matrix<double>& e) {
  // Gram determinant by plain elimination.
  const std::size_t n = e.rows();
  std::vector<std::vector<double>> g(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t c = 0; c < e.cols(); ++c) g[i][j] += e(i, c) * e(j, c);
  double det = 1;
  for (std::size_t c = 0; c < n; ++c) {
    det *= g[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = g[r][c] / g[c][c];
      for (std::size_t j = c; j < n; ++j) g[r][j] -= f * g[c][j];
    }
  }
  return std::sqrt(det);
}

}  // namespace

TEST(NumberField, RationalField) {
  auto q = NumberField::make({Int(0), Int(1)});
  EXPECT_EQ(q->degree(), 1);
  EXPECT_EQ(q->signature().real, 1);
  EXPECT_EQ(q->signature().complex, 0);
  EXPECT_EQ(q->discriminant(), 1);
}

TEST(NumberField, GaussianIntegers) {
  auto k = field_preset("Q(i)");
  EXPECT_EQ(k->degree(), 2);
  EXPECT_EQ(k->signature().real, 0);
  EXPECT_EQ(k->signature().complex, 1);
  EXPECT_EQ(k->discriminant(), -4);
  EXPECT_EQ(k->trace_form(), (IntMatrix{{Int(2), Int(0)}, {Int(0), Int(-2)}}));
  EXPECT_EQ(k->trace_gram(), (IntMatrix{{Int(2), Int(0)}, {Int(0), Int(2)}}));
}

TEST(NumberField, GoldenRatioBasis) {
  auto k = field_preset("Q(sqrt5)");
  EXPECT_EQ(k->discriminant(), 5);
  EXPECT_EQ(k->signature().real, 2);
  EXPECT_EQ(k->index(), 2);
}

TEST(NumberField, PowerBasisOfSqrt5HasDiscriminant20) {
  auto k = NumberField::make({Int(-5), Int(0), Int(1)});
  EXPECT_EQ(k->discriminant(), 20);
}

TEST(NumberField, CyclotomicQuartic) {
  auto k = field_preset("Q(zeta5)");
  EXPECT_EQ(k->discriminant(), 125);
  EXPECT_EQ(k->signature().complex, 2);
  EXPECT_NEAR(covolume(k->embedding()), 1.0, 1e-12);
}

TEST(NumberField, RejectsReducible) {
  EXPECT_THROW(NumberField::make({Int(-1), Int(0), Int(1)}), ValidationError);
  EXPECT_THROW(NumberField::make({Int(1), Int(0), Int(2), Int(0), Int(1)}), ValidationError);  // (x^2+1)^2
  EXPECT_THROW(NumberField::make({Int(-2), Int(0), Int(-1), Int(0), Int(1)}), ValidationError);  // (x^2-2)(x^2+1)
}

TEST(NumberField, RejectsNonCmField) {
  EXPECT_THROW(NumberField::make({Int(-2), Int(0), Int(0), Int(1)}), DomainError);  // cube root of 2
}

TEST(NumberField, RejectsBadBasis) {
  RatMatrix singular{{Rat(1), Rat(0)}, {Rat(2), Rat(0)}};
  EXPECT_THROW(NumberField::make({Int(1), Int(0), Int(1)}, singular), ValidationError);
  RatMatrix not_order{{Rat(1), Rat(0)}, {Rat(0), Rat(1, 2)}};
  EXPECT_THROW(NumberField::make({Int(1), Int(0), Int(1)}, not_order), ValidationError);
}

TEST(NumberField, SturmCounts) {
  EXPECT_EQ(detail::count_real_roots({Int(1), Int(0), Int(1)}), 0);
  EXPECT_EQ(detail::count_real_roots({Int(-5), Int(0), Int(1)}), 2);
  EXPECT_EQ(detail::count_real_roots({Int(-2), Int(0), Int(0), Int(1)}), 1);
  EXPECT_EQ(detail::count_real_roots({Int(1), Int(-3), Int(0), Int(1)}), 3);
}

TEST(FieldArith, Examples) {
  auto k = field_preset("Q(i)");
  EXPECT_EQ(elt(k, {1, 1}) * elt(k, {1, -1}), elt(k, {2, 0}));
  FieldElement inv = elt(k, {1, 0}) / elt(k, {1, 1});
  EXPECT_EQ(inv, FieldElement(k, {Rat(1, 2), Rat(-1, 2)}));
  auto r5 = NumberField::make({Int(-5), Int(0), Int(1)});
  EXPECT_EQ(elt(r5, {0, 1}) * elt(r5, {0, 1}), elt(r5, {5, 0}));
  EXPECT_THROW(elt(k, {1, 0}) / elt(k, {0, 0}), DomainError);
  EXPECT_THROW(elt(k, {1, 0}) + elt(r5, {1, 0}), DomainError);
}

TEST(TwistedNorm, Examples) {
  auto q = NumberField::rationals();
  auto n = trace_and_twisted_norm(FieldElement::from_rational(q, 3));
  EXPECT_EQ(n.trace_form_value, 9);
  EXPECT_DOUBLE_EQ(n.twisted_sqnorm, 9.0);

  auto k = field_preset("Q(i)");
  auto one = trace_and_twisted_norm(elt(k, {1, 0}));
  EXPECT_EQ(one.trace_form_value, 2);
  EXPECT_NEAR(one.twisted_sqnorm, 1.0, 1e-15);
  auto w = trace_and_twisted_norm(elt(k, {1, 1}));
  EXPECT_EQ(w.trace_form_value, 4);
  EXPECT_NEAR(w.twisted_sqnorm, 2.0, 1e-15);
}

TEST(MinkowskiEmbed, Examples) {
  auto q = NumberField::rationals();
  auto v = minkowski_embed({FieldElement::from_rational(q, 2), FieldElement::from_rational(q, -1)});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_DOUBLE_EQ(v[0], 2.0);
  EXPECT_DOUBLE_EQ(v[1], -1.0);

  auto k = field_preset("Q(i)");
  auto e = minkowski_embed({elt(k, {1, 0})});
  ASSERT_EQ(e.size(), 2u);
  EXPECT_NEAR(e[0] * e[0] + e[1] * e[1], 1.0, 1e-14);

  auto r5 = field_preset("Q(sqrt5)");
  auto f = minkowski_embed({elt(r5, {1, 0})});
  EXPECT_NEAR(f[0] * f[0] + f[1] * f[1], 2.0 / std::sqrt(5.0), 1e-14);
}

TEST(MinkowskiEmbed, NormConsistencyOnRandomIntegers) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> coord(-20, 20);
  for (const char* name : {"Q", "Q(i)", "Q(sqrt5)", "Q(sqrt-3)", "Q(zeta5)"}) {
    auto k = field_preset(name);
    for (int t = 0; t < 100; ++t) {
      RatVector z;
      for (int j = 0; j < k->degree(); ++j) z.emplace_back(coord(rng));
      auto x = FieldElement::from_basis_coords(k, z);
      auto e = minkowski_embed({x});
      double s = 0;
      for (double c : e) s += c * c;
      EXPECT_NEAR(s, trace_and_twisted_norm(x).twisted_sqnorm, 1e-10 * std::max(1.0, s));
    }
  }
}

TEST(MinkowskiEmbed, UnitCovolume) {
  for (const char* name : {"Q", "Q(i)", "Q(sqrt5)"}) {
    auto k = field_preset(name);
    for (std::size_t r = 1; r <= 3; ++r)
      EXPECT_NEAR(covolume(block_diagonal(k->embedding(), r)), 1.0, 1e-10) << name << " r=" << r;
  }
}

TEST(Reduction, Examples) {
  auto q = NumberField::rationals();
  auto p5 = make_prime(*q, 5, 0);
  EXPECT_EQ(reduce_mod_prime(FieldElement::from_rational(q, 7), p5), 2u);

  auto k = field_preset("Q(i)");
  auto a = make_prime(*k, 5, 2);
  EXPECT_EQ(reduce_mod_prime(elt(k, {1, 1}), a), 3u);
  auto b = make_prime(*k, 5, 3);
  EXPECT_EQ(reduce_mod_prime(elt(k, {2, -1}), b), 4u);

  EXPECT_THROW(make_prime(*k, 5, 1), ValidationError);
  EXPECT_THROW(make_prime(*k, 6, 1), ValidationError);
  EXPECT_THROW(reduce_mod_prime(FieldElement(k, {Rat(1, 2), Rat(0)}), a), DomainError);
  EXPECT_EQ(degree_one_primes(*k, 5).size(), 2u);
  EXPECT_TRUE(degree_one_primes(*k, 3).empty());
}

TEST(Reduction, RingMorphism) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> coord(-30, 30);
  for (const char* name : {"Q(i)", "Q(sqrt5)", "Q(zeta5)"}) {
    auto k = field_preset(name);
    std::vector<PrimeIdealData> primes;
    for (std::uint64_t p : {5u, 11u, 29u, 31u, 41u})
      for (auto& pr : degree_one_primes(*k, p)) primes.push_back(pr);
    ASSERT_FALSE(primes.empty()) << name;
    for (int t = 0; t < 50; ++t) {
      RatVector zx, zy;
      for (int j = 0; j < k->degree(); ++j) {
        zx.emplace_back(coord(rng));
        zy.emplace_back(coord(rng));
      }
      auto x = FieldElement::from_basis_coords(k, zx);
      auto y = FieldElement::from_basis_coords(k, zy);
      for (const auto& pr : primes) {
        std::uint64_t rx = reduce_mod_prime(x, pr), ry = reduce_mod_prime(y, pr);
        EXPECT_EQ(reduce_mod_prime(x * y, pr), rx * ry % pr.p);
        EXPECT_EQ(reduce_mod_prime(x + y, pr), (rx + ry) % pr.p);
      }
    }
  }
}

TEST(OkZBasis, Examples) {
  auto q = NumberField::rationals();
  auto b = ok_z_basis({{FieldElement::from_rational(q, 1), FieldElement::from_rational(q, 0)}});
  ASSERT_EQ(b.size(), 1u);

  auto k = field_preset("Q(i)");
  auto g = ok_z_basis({{elt(k, {1, 1}), elt(k, {0, 0})}});
  ASSERT_EQ(g.size(), 2u);
  EXPECT_EQ(g[0][0], elt(k, {1, 1}));
  EXPECT_EQ(g[1][0], elt(k, {-1, 1}));
  EXPECT_TRUE(g[1][1].is_zero());
}

TEST(OkZBasis, FullRank) {
  auto k = field_preset("Q(sqrt5)");
  auto b = ok_z_basis({{elt(k, {1, 0}), elt(k, {0, 1})}, {elt(k, {2, 0}), elt(k, {1, 1})}});
  RatMatrix m(b.size(), 4);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t c = 0; c < 2; ++c) {
      auto z = b[i][c].basis_coords();
      m(i, 2 * c) = z[0];
      m(i, 2 * c + 1) = z[1];
    }
  EXPECT_EQ(rank(m), 4u);
}

TEST(FieldSpec, Parses) {
  auto k = parse_field_spec(
      "# golden ratio\nmin_poly = -5, 0, 1\nintegral_basis = 1 0 1/2 1/2\nprecision_digits = 60\n");
  EXPECT_EQ(k->discriminant(), 5);
  EXPECT_EQ(k->precision_digits(), 60);
  EXPECT_THROW(parse_field_spec("integral_basis = 1\n"), ValidationError);
  EXPECT_THROW(parse_field_spec("min_poly = 1 0 1\nbogus = 3\n"), ValidationError);
}
