#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fixrank/core/errors.hpp"
#include "fixrank/grassmann.hpp"

using namespace fixrank;

namespace {

FieldMatrix qmat(std::initializer_list<std::initializer_list<Rat>> rows) {
  RatMatrix m(rows);
  return FieldMatrix::from_rationals(NumberField::rationals(), m);
}

std::size_t brute_primitive_count(long t) {
  std::size_t n = 0;
  for (long a = -t; a <= t; ++a)
    for (long b = -t; b <= t; ++b)
      if (a * a + b * b <= t * t && std::gcd(a, b) == 1) ++n;
  return n / 2;
}

}  // namespace

TEST(ToEchelon, Examples) {
  auto q = NumberField::rationals();
  EXPECT_EQ(to_echelon(FieldMatrix::identity(q, 2)).entries, FieldMatrix::identity(q, 2));
  EXPECT_EQ(to_echelon(qmat({{Rat(2), Rat(1)}})).entries, qmat({{Rat(1), Rat(1, 2)}}));

  auto k = field_preset("Q(i)");
  FieldMatrix m(k, 2, 2);
  m.at(0, 0) = FieldElement(k, {Rat(1), Rat(0)});
  m.at(0, 1) = FieldElement(k, {Rat(1), Rat(0)});
  m.at(1, 1) = FieldElement(k, {Rat(0), Rat(1)});
  EXPECT_EQ(to_echelon(m).entries, FieldMatrix::identity(k, 2));

  EXPECT_THROW(to_echelon(qmat({{Rat(1), Rat(2)}, {Rat(2), Rat(4)}})), ValidationError);
}

TEST(LambdaOf, Examples) {
  auto p = lambda_of(to_echelon(qmat({{Rat(1), Rat(1, 2)}})));
  EXPECT_EQ(p.lattice.basis(), (RatMatrix{{Rat(2), Rat(1)}}));
  EXPECT_EQ(p.height_sq, 5);
  EXPECT_NEAR(p.height, std::sqrt(5.0), 1e-12);
  EXPECT_EQ(p.denominator, 2);

  auto e = lambda_of(to_echelon(qmat({{Rat(1), Rat(0)}})));
  EXPECT_EQ(e.height_sq, 1);
  EXPECT_EQ(e.denominator, 1);

  auto k = field_preset("Q(i)");
  FieldMatrix d(k, 1, 2);
  d.at(0, 0) = FieldElement(k, {Rat(1), Rat(0)});
  d.at(0, 1) = FieldElement(k, {Rat(1, 2), Rat(1, 2)});
  auto g = lambda_of(to_echelon(d));
  EXPECT_EQ(g.denominator, 2);
}

TEST(LambdaOf, GaussianDenominatorMatchesBruteForce) {
  // {v in Z[i] : v * (1+i)/2 in Z[i]} has index N(2/(1+i)) = 2; count residues mod 2.
  auto k = field_preset("Q(i)");
  int good = 0;
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b) {
      FieldElement v(k, {Rat(a), Rat(b)});
      if ((v * FieldElement(k, {Rat(1, 2), Rat(1, 2)})).is_integral()) ++good;
    }
  EXPECT_EQ(4 / good, 2);
}

TEST(Denominator, Examples) {
  EXPECT_EQ(denominator(to_echelon(qmat({{Rat(1), Rat(3)}}))), 1);
  EXPECT_EQ(denominator(to_echelon(qmat({{Rat(1), Rat(1, 2)}}))), 2);
  EXPECT_EQ(denominator(to_echelon(qmat({{Rat(1), Rat(0), Rat(1, 2)}, {Rat(0), Rat(1), Rat(1, 3)}}))), 6);
  // Brute force for the last one: v in Z^2 mod 6 with v*D integral.
  int good = 0;
  for (long a = 0; a < 6; ++a)
    for (long b = 0; b < 6; ++b)
      if (Rat(make_rat(a, 2) + make_rat(b, 3)).get_den() == 1) ++good;
  EXPECT_EQ(36 / good, 6);
}

TEST(EchelonOfModule, Examples) {
  auto q = NumberField::rationals();
  auto z2 = ZLattice::standard(2);
  EXPECT_EQ(echelon_of_module(q, z2.with_basis(RatMatrix{{Rat(2), Rat(1)}})).entries, qmat({{Rat(1), Rat(1, 2)}}));
  EXPECT_EQ(echelon_of_module(q, z2.with_basis(RatMatrix{{Rat(1), Rat(0)}})).entries, qmat({{Rat(1), Rat(0)}}));
  EXPECT_THROW(echelon_of_module(q, z2.with_basis(RatMatrix{{Rat(2), Rat(2)}})), ValidationError);
}

TEST(Enumerate, Examples) {
  auto q = NumberField::rationals();
  auto two = enumerate_primitive_modules(q, 1, 2, 2.0);
  ASSERT_EQ(two.size(), 4u);
  EXPECT_EQ(two[0].height_sq, 1);
  EXPECT_EQ(two[1].height_sq, 1);
  EXPECT_EQ(two[2].height_sq, 2);
  EXPECT_EQ(two[3].height_sq, 2);
  EXPECT_EQ(schmidt_count(q, 1, 2, 1.0), 2u);
  auto full = enumerate_primitive_modules(q, 2, 2, 3.0);
  ASSERT_EQ(full.size(), 1u);
  EXPECT_EQ(full[0].height_sq, 1);
}

TEST(Enumerate, SchmidtCountsMatchBruteForce) {
  auto q = NumberField::rationals();
  for (long t : {2L, 5L, 10L, 20L}) EXPECT_EQ(schmidt_count(q, 1, 2, static_cast<double>(t)), brute_primitive_count(t)) << t;
  double r1 = static_cast<double>(schmidt_count(q, 1, 2, 10)) / static_cast<double>(schmidt_count(q, 1, 2, 5));
  double r2 = static_cast<double>(schmidt_count(q, 1, 2, 20)) / static_cast<double>(schmidt_count(q, 1, 2, 10));
  EXPECT_GE(r1, 2.0);
  EXPECT_LE(r1, 8.0);
  EXPECT_GE(r2, 2.0);
  EXPECT_LE(r2, 8.0);
}

TEST(Enumerate, RankTwoInThreeSpaceMatchesDualLines) {
  // Primitive planes in Z^3 of height H correspond to primitive normal vectors of length H.
  auto q = NumberField::rationals();
  const long t = 4;
  std::size_t brute = 0;
  for (long a = -t; a <= t; ++a)
    for (long b = -t; b <= t; ++b)
      for (long c = -t; c <= t; ++c)
        if (a * a + b * b + c * c <= t * t && std::gcd(std::gcd(a, b), c) == 1) ++brute;
  EXPECT_EQ(schmidt_count(q, 2, 3, static_cast<double>(t)), brute / 2);
}

TEST(Enumerate, GaussianLinesCompleteAgainstSaturatedSpans) {
  // Every primitive vector of Z[i]^2 in a box spans a line; those with H <= T must all be found.
  auto k = field_preset("Q(i)");
  const double t = 3.0;
  auto mods = enumerate_primitive_modules(k, 1, 2, t);
  std::set<std::string> keys;
  for (const auto& p : mods) keys.insert(p.echelon.key());
  EXPECT_EQ(keys.size(), mods.size());
  std::set<std::string> brute;
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      for (long c = -3; c <= 3; ++c)
        for (long e = -3; e <= 3; ++e) {
          if (a == 0 && b == 0 && c == 0 && e == 0) continue;
          std::vector<RatVector> row{{Rat(a), Rat(b), Rat(c), Rat(e)}};
          auto p = lambda_of(to_echelon(FieldMatrix::from_row_coords(k, row, 2)));
          if (p.height_sq <= Rat(9)) brute.insert(p.echelon.key());
        }
  for (const auto& key : brute) EXPECT_TRUE(keys.count(key)) << key;
}

TEST(Trijection, RoundTripsAndInvariants) {
  for (const char* name : {"Q", "Q(i)", "Q(sqrt5)"}) {
    auto k = field_preset(name);
    for (std::size_t kk : {1u, 2u}) {
      auto mods = enumerate_primitive_modules(k, kk, 3, k->degree() == 1 ? 4.0 : (kk == 1 ? 2.5 : 1.8));
      ASSERT_FALSE(mods.empty());
      for (const auto& p : mods) {
        EXPECT_EQ(echelon_of_module(k, p.lattice), p.echelon);
        EXPECT_EQ(lambda_of(echelon_of_module(k, p.lattice)).lattice.basis(), p.lattice.basis());
        EXPECT_EQ(jacobian_ratio(p), Rat(p.denominator * p.denominator));
        EXPECT_EQ(height_sq(p.echelon), p.height_sq);
        EXPECT_EQ(p.denominator == 1, p.echelon.entries.is_integral());
      }
    }
  }
}

TEST(Trijection, IndexAndHeightPowerLaws) {
  auto q = NumberField::rationals();
  auto k = field_preset("Q(i)");
  std::vector<PrimitiveModule> mods = enumerate_primitive_modules(q, 1, 3, 3.0);
  auto more = enumerate_primitive_modules(k, 1, 2, 2.0);
  mods.insert(mods.end(), more.begin(), more.end());
  for (const auto& p : mods) {
    for (std::size_t n : {1u, 2u}) {
      Int expect = 1;
      for (std::size_t i = 0; i < n; ++i) expect *= p.denominator;
      EXPECT_EQ(row_index(p, n), expect);
    }
    for (std::size_t n : {1u, 2u, 3u}) {
      ZLattice big = orthogonal_power(p.lattice, n);
      EXPECT_NEAR(big.height(), std::pow(p.height, static_cast<double>(n)),
                  1e-10 * std::pow(p.height, static_cast<double>(n)));
    }
  }
}

TEST(Trijection, InvariantUnderChoiceOfBasis) {
  auto q = NumberField::rationals();
  auto a = to_echelon(qmat({{Rat(1), Rat(0), Rat(1, 2)}, {Rat(0), Rat(1), Rat(1, 3)}}));
  auto b = to_echelon(qmat({{Rat(3), Rat(5), Rat(19, 6)}, {Rat(1), Rat(-1), Rat(1, 6)}}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(lambda_of(a).height_sq, lambda_of(b).height_sq);
  EXPECT_EQ(denominator(a), denominator(b));
}

TEST(MatricesWithRows, Examples) {
  auto p = lambda_of(to_echelon(qmat({{Rat(1), Rat(1, 2)}})));
  EXPECT_EQ(matrices_with_rows(1, p, 4.0).size(), short_vectors(p.lattice, 4.0).size());
  EXPECT_EQ(matrices_with_rows(2, p, std::sqrt(10.0)).size(), 9u);
  auto only_zero = matrices_with_rows(2, p, 1.0);
  ASSERT_EQ(only_zero.size(), 1u);
  EXPECT_EQ(only_zero[0], IntMatrix(2, 2));
}

TEST(ModuleJson, Fields) {
  auto p = lambda_of(to_echelon(qmat({{Rat(1), Rat(1, 2)}})));
  std::string j = module_json(p);
  EXPECT_NE(j.find("\"1/2\""), std::string::npos);
  EXPECT_NE(j.find("\"denominator\":2"), std::string::npos);
  EXPECT_NE(j.find("\"H\":\"2.23606797749979\""), std::string::npos);
}
