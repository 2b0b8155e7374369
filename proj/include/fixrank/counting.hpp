#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fixrank/grassmann.hpp"

namespace fixrank {

enum class TestKind { ball, product_of_balls, custom };

/// Real n x (m*d) matrix of scaled Minkowski coordinates; column block j holds entry column j.
using EmbeddedMatrix = Matrix<double>;
using MatrixEvaluator = std::function<double(const EmbeddedMatrix&)>;

/// Compactly supported test function on M_{n x m}(K_R).
struct TestFunction {
  TestKind kind = TestKind::ball;
  double radius = 1.0;          // ball radius, or per-column radius for product_of_balls
  double custom_support = 0.0;  // Frobenius support radius for custom kinds
  MatrixEvaluator evaluator;    // custom kinds only

  static TestFunction ball(double r);
  static TestFunction product_of_balls(double r);
  static TestFunction custom(double support_radius, MatrixEvaluator f);

  /// Frobenius radius containing the support for m columns.
  double support_radius(std::size_t m) const;
  bool is_indicator() const { return kind != TestKind::custom; }
  double operator()(const EmbeddedMatrix& x, std::size_t d) const;
  std::string name() const;
};

/// Parses "ball:R" or "product_of_balls:R".
TestFunction parse_test_function(const std::string& text);

std::size_t rank_over_K(const FieldMatrix& a);

struct RankFactorization {
  FieldMatrix c;  // n x k
  EchelonMatrix d;
};

/// A = C * D with D echelon; throws ValidationError on the zero matrix.
RankFactorization rank_factorize(const FieldMatrix& a);

enum class CountStrategy { automatic, brute, pruned };

struct RankCountReport {
  double T = 0;
  double raw_sum = 0;
  std::optional<Int> exact_count;  // indicator test functions
  double normalized = 0;           // raw_sum / T^(knd)
  std::uint64_t matrices_seen = 0;
  std::string strategy;
};

/// Sum of f(A/T) over A in M_{n x m}(O_K) of rank k over K.
RankCountReport lhs_count(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k, double T,
                          const TestFunction& f, CountStrategy strategy = CountStrategy::automatic);

struct ModuleCount {
  std::string key;
  Rat height_sq;
  double value = 0;
};

struct DecompositionReport {
  double raw_sum = 0;
  std::optional<Int> exact_count;
  double height_bound = 0;
  std::vector<ModuleCount> per_module;  // only modules with a nonzero contribution
};

/// Same sum regrouped by row module: sum over D of the rank-k elements of M_n(Lambda_D).
DecompositionReport decomposition_count(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k,
                                        double T, const TestFunction& f);

enum class TermMethod { automatic, monte_carlo };

struct TermValue {
  double value = 0;
  double std_error = 0;
  bool closed_form = false;
  std::uint64_t samples = 0;
};

/// denominator(D)^(-n) times the integral of f(xD) over x in M_{n x k}(K_R).
TermValue term_value(const PrimitiveModule& p, std::size_t n, const TestFunction& f, std::uint64_t mc_samples,
                     std::uint64_t seed, TermMethod method = TermMethod::automatic);

struct C1Term {
  std::string key;
  Rat height_sq;
  Int denominator;
  bool zero_column = false;  // xD then always has a zero column
  TermValue term;
};

struct C1Estimate {
  std::size_t n = 0, m = 0, k = 0;
  double cutoff = 0;
  double partial_sum = 0;
  double std_error = 0;
  std::size_t term_count = 0;
  double tail_estimate = 0;  // heuristic, never added to partial_sum
  std::vector<C1Term> terms;
};

C1Estimate c1_estimate(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k, const TestFunction& f,
                       double height_cutoff, std::uint64_t mc_samples = 0, std::uint64_t seed = 0);

/// Riemann zeta at s > 1, absolute error below 1e-12.
double zeta(double s);

struct IdentityCheck {
  double lhs = 0;
  double rhs = 0;
  double relative_error = 0;
  /// Same comparison with both truncation tails replaced by their integral approximations.
  double tail_corrected_error = 0;
  std::size_t term_count = 0;
};

/// lhs = zeta(n) * sum over primitive v, rhs = sum over nonzero v, both with |v| <= cutoff.
IdentityCheck primitive_zeta_check(std::size_t n, std::size_t m, double cutoff);

/// lhs = sum of term_value over rank-one modules with H <= cutoff (unit ball),
/// rhs = V(n) * (1/2) sum' |v|^(-n) / zeta(n) with the same cutoff.
IdentityCheck koecher_identity_check(std::size_t n, std::size_t m, double cutoff);

/// Seeds for independent per-item streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);
/// Uniform double in [0, 1) from 53 random bits.
double unit_uniform(std::uint64_t bits);

}  // namespace fixrank
