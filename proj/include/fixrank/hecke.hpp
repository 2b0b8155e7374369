#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "fixrank/counting.hpp"

namespace fixrank {

/// Number of u-dimensional subspaces of F_q^t.
Int gaussian_binomial(std::size_t u, std::size_t t, std::uint64_t q);

/// Subspace of F_q^n stored by its reduced row echelon basis.
struct FiniteSubspace {
  std::uint64_t q = 2;
  std::size_t n = 0;
  std::vector<std::vector<std::uint64_t>> basis;  // s x n

  std::size_t s() const { return basis.size(); }
  std::string key() const;
  friend bool operator==(const FiniteSubspace& a, const FiniteSubspace& b) {
    return a.q == b.q && a.n == b.n && a.basis == b.basis;
  }
};

/// Canonical form of the span of rows; throws ValidationError when the rows are dependent.
FiniteSubspace make_subspace(std::uint64_t q, std::size_t n, std::vector<std::vector<std::uint64_t>> rows);

/// Rank over F_p of the columns given as vectors of F_p^n.
std::size_t rank_mod_p(const std::vector<std::vector<std::uint64_t>>& vectors, std::uint64_t p);

/// Every s-dimensional subspace, ordered by pivot pattern then free entries.
std::vector<FiniteSubspace> enumerate_subspaces(std::size_t s, std::size_t n, std::uint64_t q);

/// Uniform random subspace: Schubert cell drawn with weight q^dim, then free entries uniformly.
FiniteSubspace sample_subspace(std::size_t s, std::size_t n, std::uint64_t q, std::mt19937_64& rng);

/// Probability that a uniform s-dimensional subspace of F_q^n contains a fixed k-dimensional one.
Rat containment_probability(std::size_t k, std::size_t s, std::size_t n, std::uint64_t q);

/// containment_probability * q^(k(n-s)) - 1.
double containment_law_error(std::size_t k, std::size_t s, std::size_t n, std::uint64_t q);

/// p^((1 - s/n)/d).
double hecke_scale(std::uint64_t p, std::size_t s, std::size_t n, std::size_t d);

struct HeckeLattice {
  ZLattice lattice;  // preimage of S in O_K^n, carrying the symbolic T^(-2) factor in its scale
  PrimeIdealData prime;
  FiniteSubspace subspace;
  double t_scale = 1;
};

HeckeLattice hecke_neighbor(const FieldPtr& field, const PrimeIdealData& prime, const FiniteSubspace& s);

/// Number of lattice vectors in the ball of g; g must be a ball kind.
Int lattice_count(const ZLattice& l, const TestFunction& g, bool include_zero);
double lattice_sum(const HeckeLattice& l, const TestFunction& g, bool include_zero);

enum class MomentMode { exact, sampled };

struct MomentSpec {
  MomentMode mode = MomentMode::exact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::string describe() const;
};

/// Parses "exact" or "sampled:<count>".
MomentSpec parse_moment_mode(const std::string& text, std::uint64_t seed);

struct MomentValue {
  double value = 0;  // zero included
  double value_without_zero = 0;
  std::optional<Rat> exact;
  std::optional<Rat> exact_without_zero;
  double std_error = 0;
  double std_error_without_zero = 0;
  std::uint64_t lattices = 0;
};

/// Average over the (P, s)-neighbors of O_K^n of (sum over the lattice of g)^m.
MomentValue moment_lhs(const FieldPtr& field, const PrimeIdealData& prime, std::size_t n, std::size_t s, std::size_t m,
                       const TestFunction& g, const MomentSpec& spec);

struct StratifiedValue {
  Rat value;
  Rat value_without_zero;
  std::vector<Int> tuples_by_rank;  // index: rank of the reduction mod P
  std::vector<Int> tuples_by_rank_without_zero;
};

/// The same moment rewritten as a sum over integral n x m matrices weighted by the
/// probability that their reduction lies in a random S.
StratifiedValue moment_stratified(const FieldPtr& field, const PrimeIdealData& prime, std::size_t n, std::size_t s,
                                  std::size_t m, const TestFunction& g);

struct RhsTerm {
  std::size_t k = 0;
  double partial = 0;
  double partial_without_zero = 0;
  double std_error = 0;
  std::size_t term_count = 0;
  double tail_estimate = 0;
};

struct RhsLimit {
  double value = 0;
  double value_without_zero = 0;
  double std_error = 0;
  std::vector<RhsTerm> per_k;
};

/// Limit of the moment as N(P) grows: g(0)^m plus the echelon series for each rank k.
RhsLimit moment_rhs_limit(const FieldPtr& field, std::size_t n, std::size_t m, const TestFunction& g,
                          double height_cutoff, std::uint64_t mc_samples, std::uint64_t seed);

struct RankDropReport {
  std::size_t rank_k = 0;
  std::size_t rank_mod_p = 0;
  bool dropped = false;
  double norm = 0;
  double constant = 0;  // c in |x| >= c * N(P)^(1/(kd))
  double bound = 0;
  bool bound_satisfied = true;
};

/// c = |disc|^(-1/(2d)) * sqrt(k*d): a nonzero k x k minor lies in P, so its norm is at least
/// N(P); Hadamard in every embedding and AM-GM over the k*d column norms give the bound.
double rank_drop_constant(const NumberField& field, std::size_t k);
RankDropReport rank_drop_check(const FieldMatrix& x, const PrimeIdealData& prime);

/// Throws ValidationError unless s = n - 1 or 1 - s/n < 1/m (with 1 <= m < n, s <= n).
void check_moment_window(std::size_t n, std::size_t m, std::size_t s);

struct MomentReport {
  std::uint64_t p = 0;
  std::uint64_t root = 0;
  std::size_t n = 0, s = 0, m = 0;
  std::string mode;
  MomentValue lhs;
  std::optional<StratifiedValue> stratified;  // absent when the tuple count exceeds the cap
  double rhs_limit = 0;
  double rhs_limit_without_zero = 0;
  double abs_error = 0;
  double abs_error_without_zero = 0;
};

std::vector<MomentReport> convergence_table(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t s,
                                            const TestFunction& g, const std::vector<std::uint64_t>& primes,
                                            const MomentSpec& spec, double height_cutoff,
                                            std::uint64_t mc_samples = 0);

}  // namespace fixrank
