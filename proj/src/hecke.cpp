#include "fixrank/hecke.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "fixrank/core/errors.hpp"
#include "fixrank/core/parallel.hpp"

namespace fixrank {

// ---- finite fields ----

Int gaussian_binomial(std::size_t u, std::size_t t, std::uint64_t q) {
  if (u > t) throw ValidationError("gaussian_binomial needs u <= t");
  if (q < 2) throw ValidationError("gaussian_binomial needs q >= 2");
  Int num = 1, den = 1;
  const Int qq(static_cast<unsigned long>(q));
  for (std::size_t i = 0; i < u; ++i) {
    num *= int_pow(qq, t) - int_pow(qq, i);
    den *= int_pow(qq, u) - int_pow(qq, i);
  }
  return Int(num / den);
}

namespace {

using ModRow = std::vector<std::uint64_t>;

// Rows reduced against each other as they arrive; each row has a 1 at its pivot and
// zeros at the pivots of the rows before it.
struct IncrementalBasis {
  std::uint64_t p;
  std::vector<ModRow> rows;
  std::vector<std::size_t> pivots;

  // Returns true if v was independent and has been added.
  bool add(ModRow v) {
    for (std::size_t b = 0; b < rows.size(); ++b) {
      const std::uint64_t c = v[pivots[b]];
      if (c == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j)
        v[j] = (v[j] + p - mul_mod(c, rows[b][j], p)) % p;
    }
    auto it = std::find_if(v.begin(), v.end(), [](std::uint64_t x) { return x != 0; });
    if (it == v.end()) return false;
    const std::size_t piv = static_cast<std::size_t>(it - v.begin());
    const std::uint64_t inv = inv_mod(v[piv], p);
    for (auto& x : v) x = mul_mod(x, inv, p);
    rows.push_back(std::move(v));
    pivots.push_back(piv);
    return true;
  }
};

// Reduced row echelon form mod p, in place; returns the pivot columns.
std::vector<std::size_t> rref_mod_p(std::vector<ModRow>& a, std::uint64_t p) {
  std::vector<std::size_t> piv;
  if (a.empty()) return piv;
  const std::size_t cols = a[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < a.size(); ++c) {
    std::size_t sel = r;
    while (sel < a.size() && a[sel][c] == 0) ++sel;
    if (sel == a.size()) continue;
    std::swap(a[r], a[sel]);
    const std::uint64_t inv = inv_mod(a[r][c], p);
    for (auto& x : a[r]) x = mul_mod(x, inv, p);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r || a[i][c] == 0) continue;
      const std::uint64_t f = a[i][c];
      for (std::size_t j = 0; j < cols; ++j) a[i][j] = (a[i][j] + p - mul_mod(f, a[r][j], p)) % p;
    }
    piv.push_back(c);
    ++r;
  }
  a.resize(r);
  return piv;
}

std::uint64_t uniform_below(std::uint64_t bound, std::mt19937_64& rng) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

Int uniform_below(const Int& bound, std::mt19937_64& rng) {
  const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
  for (;;) {
    Int x = 0;
    for (std::size_t w = 0; w < (bits + 63) / 64; ++w) {
      x <<= 64;
      x += Int(static_cast<unsigned long>(rng()));
    }
    mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), bits);
    if (x < bound) return x;
  }
}

// Calls visit(pivots) for every s-subset of {0..n-1} in lexicographic order.
template <class Visit>
void for_each_pivot_set(std::size_t s, std::size_t n, Visit&& visit) {
  std::vector<std::size_t> c(s);
  for (std::size_t i = 0; i < s; ++i) c[i] = i;
  for (;;) {
    if (!visit(c)) return;
    std::size_t i = s;
    while (i > 0 && c[i - 1] == n - s + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < s; ++j) c[j] = c[j - 1] + 1;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> free_positions(const std::vector<std::size_t>& piv, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < piv.size(); ++i)
    for (std::size_t j = piv[i] + 1; j < n; ++j)
      if (std::find(piv.begin(), piv.end(), j) == piv.end()) out.emplace_back(i, j);
  return out;
}

FiniteSubspace cell_member(std::uint64_t q, std::size_t n, const std::vector<std::size_t>& piv,
                           const std::vector<std::pair<std::size_t, std::size_t>>& pos,
                           const std::vector<std::uint64_t>& values) {
  FiniteSubspace out;
  out.q = q;
  out.n = n;
  out.basis.assign(piv.size(), ModRow(n, 0));
  for (std::size_t i = 0; i < piv.size(); ++i) out.basis[i][piv[i]] = 1;
  for (std::size_t f = 0; f < pos.size(); ++f) out.basis[pos[f].first][pos[f].second] = values[f];
  return out;
}

void check_prime(std::uint64_t q) {
  if (!is_prime(q)) throw ValidationError("finite field order must be prime, got " + std::to_string(q));
}

}  // namespace

std::string FiniteSubspace::key() const {
  std::ostringstream os;
  os << q << ':' << n << ':';
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (i) os << ';';
    for (std::size_t j = 0; j < n; ++j) os << (j ? "," : "") << basis[i][j];
  }
  return os.str();
}

FiniteSubspace make_subspace(std::uint64_t q, std::size_t n, std::vector<std::vector<std::uint64_t>> rows) {
  check_prime(q);
  const std::size_t s = rows.size();
  for (auto& r : rows) {
    if (r.size() != n) throw ValidationError("subspace row has wrong length");
    for (auto& x : r) x %= q;
  }
  rref_mod_p(rows, q);
  if (rows.size() != s) throw ValidationError("subspace rows are linearly dependent");
  return {q, n, std::move(rows)};
}

std::size_t rank_mod_p(const std::vector<std::vector<std::uint64_t>>& vectors, std::uint64_t p) {
  IncrementalBasis b{p, {}, {}};
  for (const auto& v : vectors) {
    ModRow r = v;
    for (auto& x : r) x %= p;
    b.add(std::move(r));
  }
  return b.rows.size();
}

std::vector<FiniteSubspace> enumerate_subspaces(std::size_t s, std::size_t n, std::uint64_t q) {
  check_prime(q);
  if (s > n) throw ValidationError("need s <= n");
  const Int count = gaussian_binomial(s, n, q);
  const double work = count.get_d() * static_cast<double>(q);
  if (work > enumeration_cap())
    throw CapExceeded("Grassmannian has " + count.get_str() + " points; use sampling", work);
  std::vector<FiniteSubspace> out;
  out.reserve(count.get_ui());
  for_each_pivot_set(s, n, [&](const std::vector<std::size_t>& piv) {
    auto pos = free_positions(piv, n);
    std::vector<std::uint64_t> values(pos.size(), 0);
    for (;;) {
      out.push_back(cell_member(q, n, piv, pos, values));
      std::size_t i = values.size();
      while (i > 0 && values[i - 1] == q - 1) values[--i] = 0;
      if (i == 0) break;
      ++values[i - 1];
    }
    return true;
  });
  return out;
}

FiniteSubspace sample_subspace(std::size_t s, std::size_t n, std::uint64_t q, std::mt19937_64& rng) {
  check_prime(q);
  if (s > n) throw ValidationError("need s <= n");
  Int r = uniform_below(gaussian_binomial(s, n, q), rng);
  const Int qq(static_cast<unsigned long>(q));
  std::vector<std::size_t> chosen;
  for_each_pivot_set(s, n, [&](const std::vector<std::size_t>& piv) {
    Int w = int_pow(qq, free_positions(piv, n).size());
    if (r < w) {
      chosen = piv;
      return false;
    }
    r -= w;
    return true;
  });
  auto pos = free_positions(chosen, n);
  std::vector<std::uint64_t> values(pos.size());
  for (auto& v : values) v = uniform_below(q, rng);
  return cell_member(q, n, chosen, pos, values);
}

Rat containment_probability(std::size_t k, std::size_t s, std::size_t n, std::uint64_t q) {
  if (k > n || s > n) throw ValidationError("need k <= n and s <= n");
  if (s < k) return Rat(0);
  return make_rat(gaussian_binomial(s - k, n - k, q), gaussian_binomial(s, n, q));
}

double containment_law_error(std::size_t k, std::size_t s, std::size_t n, std::uint64_t q) {
  Rat v = containment_probability(k, s, n, q) * Rat(int_pow(Int(static_cast<unsigned long>(q)), k * (n - s)));
  return to_double(Rat(v - 1));
}

double hecke_scale(std::uint64_t p, std::size_t s, std::size_t n, std::size_t d) {
  return std::pow(static_cast<double>(p), (1.0 - static_cast<double>(s) / static_cast<double>(n)) / static_cast<double>(d));
}

// ---- neighbors ----

namespace {

ScaleFactor neighbor_scale(const NumberField& field, std::uint64_t p, std::size_t s, std::size_t n) {
  const long num = -2 * static_cast<long>(n - s);
  const long den = static_cast<long>(n) * field.degree();
  return field.norm_scale() * ScaleFactor::power(Int(static_cast<unsigned long>(p)), make_rat(Int(num), Int(den)));
}

void check_prime_matches(const NumberField& field, const PrimeIdealData& prime) {
  if (prime.residue_degree != 1 || prime.basis_images.size() != static_cast<std::size_t>(field.degree()))
    throw ValidationError("prime ideal does not belong to this field or has residue degree > 1");
}

}  // namespace

HeckeLattice hecke_neighbor(const FieldPtr& field, const PrimeIdealData& prime, const FiniteSubspace& sub) {
  check_prime_matches(*field, prime);
  if (sub.q != prime.p)
    throw ValidationError("subspace lives over F_" + std::to_string(sub.q) + " but the prime lies over " +
                          std::to_string(prime.p));
  const std::uint64_t p = prime.p;
  const std::size_t n = sub.n, s = sub.s(), d = field->degree(), nd = n * d;

  // Parity checks of S, one per non-pivot column.
  std::vector<std::size_t> piv;
  for (const auto& row : sub.basis)
    piv.push_back(static_cast<std::size_t>(std::find(row.begin(), row.end(), 1u) - row.begin()));
  std::vector<ModRow> checks;
  for (std::size_t f = 0; f < n; ++f) {
    if (std::find(piv.begin(), piv.end(), f) != piv.end()) continue;
    ModRow h(n, 0);
    h[f] = 1;
    for (std::size_t i = 0; i < s; ++i) h[piv[i]] = (p - sub.basis[i][f]) % p;
    checks.push_back(std::move(h));
  }
  // Conditions on integral-basis coordinates: checks composed with reduction mod P.
  std::vector<ModRow> a;
  for (const auto& h : checks) {
    ModRow row(nd, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < d; ++t) row[i * d + t] = mul_mod(h[i], prime.basis_images[t] % p, p);
    a.push_back(std::move(row));
  }
  auto apiv = rref_mod_p(a, p);

  IntMatrix gens(0, nd);
  for (std::size_t c = 0; c < nd; ++c) {
    if (std::find(apiv.begin(), apiv.end(), c) != apiv.end()) continue;
    IntVector v(nd, 0);
    v[c] = 1;
    for (std::size_t r = 0; r < a.size(); ++r)
      v[apiv[r]] = Int(static_cast<unsigned long>((p - a[r][c]) % p));
    gens.append_row(v);
  }
  for (std::size_t c = 0; c < nd; ++c) {
    IntVector v(nd, 0);
    v[c] = Int(static_cast<unsigned long>(p));
    gens.append_row(v);
  }
  HnfResult h = hermite_normal_form(gens);
  if (h.rank != nd) throw DomainError("neighbor lattice is not full rank");

  HeckeLattice out{ZLattice::ok_power(*field, n)
                       .with_basis(to_rat(h.h.submatrix_rows(0, nd)))
                       .with_scale(neighbor_scale(*field, p, s, n)),
                   prime, sub, hecke_scale(p, s, n, d)};
  const double height = out.lattice.height();
  if (std::abs(height - 1.0) > 1e-10)
    throw DomainError("neighbor lattice has covolume " + format_real(height) + ", expected 1");
  return out;
}

Int lattice_count(const ZLattice& l, const TestFunction& g, bool include_zero) {
  if (!g.is_indicator()) throw ValidationError("lattice counts need an indicator test function");
  auto pts = short_vectors_with_norms(l, SquaredBound::from_radius(g.support_radius(1)));
  Int c(static_cast<unsigned long>(pts.size()));
  return include_zero ? c : Int(c - 1);
}

double lattice_sum(const HeckeLattice& l, const TestFunction& g, bool include_zero) {
  return lattice_count(l.lattice, g, include_zero).get_d();
}

// ---- moments ----

std::string MomentSpec::describe() const {
  return mode == MomentMode::exact ? "exact" : "sampled:" + std::to_string(samples);
}

MomentSpec parse_moment_mode(const std::string& text, std::uint64_t seed) {
  MomentSpec spec;
  spec.seed = seed;
  if (text == "exact" || text == "exact_all_subspaces") return spec;
  const std::string prefix = "sampled:";
  if (text.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string rest = text.substr(prefix.size());
      const unsigned long long n = std::stoull(rest, &used);
      if (used == rest.size() && n > 0) {
        spec.mode = MomentMode::sampled;
        spec.samples = n;
        return spec;
      }
    } catch (const std::exception&) {
    }
  }
  throw ValidationError("bad moment mode '" + text + "' (expected exact or sampled:<count>)");
}

MomentValue moment_lhs(const FieldPtr& field, const PrimeIdealData& prime, std::size_t n, std::size_t s, std::size_t m,
                       const TestFunction& g, const MomentSpec& spec) {
  check_prime_matches(*field, prime);
  if (m < 1 || n < 1 || s > n) throw ValidationError("need m >= 1, n >= 1 and s <= n");
  if (!g.is_indicator()) throw ValidationError("moments need an indicator test function");
  MomentValue out;
  auto count_of = [&](const FiniteSubspace& sub) { return lattice_count(hecke_neighbor(field, prime, sub).lattice, g, true); };

  if (spec.mode == MomentMode::exact) {
    auto subs = enumerate_subspaces(s, n, prime.p);
    std::vector<Int> counts(subs.size());
    parallel_for(subs.size(), [&](std::size_t i) { counts[i] = count_of(subs[i]); });
    Int with = 0, without = 0;
    for (const Int& c : counts) {
      with += int_pow(c, m);
      without += int_pow(Int(c - 1), m);
    }
    const Int total(static_cast<unsigned long>(subs.size()));
    out.exact = make_rat(with, total);
    out.exact_without_zero = make_rat(without, total);
    out.value = to_double(*out.exact);
    out.value_without_zero = to_double(*out.exact_without_zero);
    out.lattices = subs.size();
    return out;
  }

  if (spec.samples == 0) throw ValidationError("sampled mode needs a positive sample count");
  std::vector<Int> counts(spec.samples);
  parallel_for(spec.samples, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(spec.seed, i));
    counts[i] = count_of(sample_subspace(s, n, prime.p, rng));
  });
  auto summarize = [&](int shift, double& mean_out, double& err_out) {
    double mean = 0, m2 = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const double v = std::pow(counts[i].get_d() + shift, static_cast<double>(m));
      const double delta = v - mean;
      mean += delta / static_cast<double>(i + 1);
      m2 += delta * (v - mean);
    }
    const double nn = static_cast<double>(counts.size());
    mean_out = mean;
    err_out = counts.size() > 1 ? std::sqrt(m2 / (nn - 1) / nn) : 0.0;
  };
  summarize(0, out.value, out.std_error);
  summarize(-1, out.value_without_zero, out.std_error_without_zero);
  out.lattices = spec.samples;
  return out;
}

StratifiedValue moment_stratified(const FieldPtr& field, const PrimeIdealData& prime, std::size_t n, std::size_t s,
                                  std::size_t m, const TestFunction& g) {
  check_prime_matches(*field, prime);
  if (m < 1 || n < 1 || s > n) throw ValidationError("need m >= 1, n >= 1 and s <= n");
  if (!g.is_indicator()) throw ValidationError("moments need an indicator test function");
  const std::uint64_t p = prime.p;
  const std::size_t d = field->degree();

  // Columns: vectors of O_K^n whose rescaled norm is within the support of g.
  ZLattice ambient = ZLattice::ok_power(*field, n).with_scale(neighbor_scale(*field, p, s, n));
  auto pts = short_vectors_with_norms(ambient, SquaredBound::from_radius(g.support_radius(1)));

  struct Group {
    ModRow residue;
    bool zero_vector;
    Int count;
  };
  std::map<std::pair<ModRow, bool>, Int> tally;
  for (const auto& pt : pts) {
    ModRow r(n, 0);
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t t = 0; t < d; ++t) {
        const Int& c = pt.coords[i * d + t];
        if (c != 0) zero = false;
        acc = (acc + mul_mod(mod_u64(c, p), prime.basis_images[t] % p, p)) % p;
      }
      r[i] = acc;
    }
    tally[{std::move(r), zero}] += 1;
  }
  std::vector<Group> groups;
  for (auto& [key, c] : tally) groups.push_back({key.first, key.second, c});
  const double work = std::pow(static_cast<double>(groups.size()), static_cast<double>(m));
  if (work > enumeration_cap()) throw CapExceeded("too many column tuples for the stratified sum", work);

  StratifiedValue out;
  out.tuples_by_rank.assign(m + 1, Int(0));
  out.tuples_by_rank_without_zero.assign(m + 1, Int(0));
  // Depth-first over column tuples, carrying the echelon basis of their reductions.
  auto visit = [&](auto&& self, std::size_t depth, const IncrementalBasis& basis, const Int& weight,
                   bool has_zero) -> void {
    if (depth == m) {
      out.tuples_by_rank[basis.rows.size()] += weight;
      if (!has_zero) out.tuples_by_rank_without_zero[basis.rows.size()] += weight;
      return;
    }
    for (const auto& gr : groups) {
      IncrementalBasis next = basis;
      next.add(gr.residue);
      self(self, depth + 1, next, Int(weight * gr.count), has_zero || gr.zero_vector);
    }
  };
  visit(visit, 0, IncrementalBasis{p, {}, {}}, Int(1), false);

  out.value = 0;
  out.value_without_zero = 0;
  for (std::size_t r = 0; r <= m; ++r) {
    const Rat pr = containment_probability(std::min(r, n), s, n, p);
    out.value += Rat(out.tuples_by_rank[r]) * pr;
    out.value_without_zero += Rat(out.tuples_by_rank_without_zero[r]) * pr;
  }
  return out;
}

RhsLimit moment_rhs_limit(const FieldPtr& field, std::size_t n, std::size_t m, const TestFunction& g,
                          double height_cutoff, std::uint64_t mc_samples, std::uint64_t seed) {
  if (n < 2 || m < 1 || m > n - 1) throw ValidationError("need n >= 2 and 1 <= m <= n - 1");
  if (!g.is_indicator()) throw ValidationError("moments need an indicator test function");
  const TestFunction f = TestFunction::product_of_balls(g.support_radius(1));
  RhsLimit out;
  out.value = 1.0;  // the zero matrix
  double var = 0;
  for (std::size_t k = 1; k <= m; ++k) {
    C1Estimate est = c1_estimate(field, n, m, k, f, height_cutoff, mc_samples, derive_seed(seed, k));
    RhsTerm t;
    t.k = k;
    t.partial = est.partial_sum;
    for (const auto& term : est.terms)
      if (!term.zero_column) t.partial_without_zero += term.term.value;
    t.std_error = est.std_error;
    t.term_count = est.term_count;
    t.tail_estimate = est.tail_estimate;
    out.value += t.partial;
    out.value_without_zero += t.partial_without_zero;
    var += t.std_error * t.std_error;
    out.per_k.push_back(t);
  }
  out.std_error = std::sqrt(var);
  return out;
}

// ---- rank drop ----

double rank_drop_constant(const NumberField& field, std::size_t k) {
  return std::sqrt(field.norm_scale().value() * static_cast<double>(k) * field.degree());
}

RankDropReport rank_drop_check(const FieldMatrix& x, const PrimeIdealData& prime) {
  const NumberField& field = *x.field();
  check_prime_matches(field, prime);
  if (!x.is_integral()) throw ValidationError("rank_drop_check needs an integral matrix");
  RankDropReport rep;
  rep.rank_k = rank_over_k(x);
  std::vector<ModRow> rows(x.rows(), ModRow(x.cols(), 0));
  double sq = 0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) {
      rows[i][j] = reduce_mod_prime(x.at(i, j), prime);
      sq += trace_and_twisted_norm(x.at(i, j)).twisted_sqnorm;
    }
  rep.rank_mod_p = rank_mod_p(rows, prime.p);
  rep.norm = std::sqrt(sq);
  rep.dropped = rep.rank_mod_p < rep.rank_k;
  if (rep.rank_k > 0) {
    rep.constant = rank_drop_constant(field, rep.rank_k);
    rep.bound = rep.constant * std::pow(static_cast<double>(prime.norm),
                                        1.0 / static_cast<double>(rep.rank_k * field.degree()));
  }
  rep.bound_satisfied = !rep.dropped || rep.norm >= rep.bound * (1 - 1e-12);
  return rep;
}

// ---- convergence ----

void check_moment_window(std::size_t n, std::size_t m, std::size_t s) {
  const std::string got = "n=" + std::to_string(n) + ", m=" + std::to_string(m) + ", s=" + std::to_string(s);
  if (n < 2 || m < 1 || m > n - 1) throw ValidationError("need n >= 2 and 1 <= m <= n - 1, got " + got);
  if (s > n) throw ValidationError("need s <= n, got " + got);
  if (s == n - 1) return;
  if ((n - s) * m < n) return;
  throw ValidationError("moment window violated: need s = n - 1 or 1 - s/n < 1/m, got " + got + " (1 - s/n = " +
                        to_string(make_rat(Int(static_cast<unsigned long>(n - s)), Int(static_cast<unsigned long>(n)))) +
                        " >= 1/m = 1/" + std::to_string(m) + ")");
}

std::vector<MomentReport> convergence_table(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t s,
                                            const TestFunction& g, const std::vector<std::uint64_t>& primes,
                                            const MomentSpec& spec, double height_cutoff,
                                            std::uint64_t mc_samples) {
  check_moment_window(n, m, s);
  for (std::size_t i = 1; i < primes.size(); ++i)
    if (primes[i] <= primes[i - 1]) throw ValidationError("primes must be strictly increasing");
  const RhsLimit rhs = moment_rhs_limit(field, n, m, g, height_cutoff, mc_samples, spec.seed);
  std::vector<MomentReport> out;
  for (std::uint64_t p : primes) {
    if (!is_prime(p)) throw ValidationError(std::to_string(p) + " is not prime");
    auto ideals = degree_one_primes(*field, p);
    if (ideals.empty()) throw ValidationError("no usable degree-one prime above " + std::to_string(p));
    MomentReport rep;
    rep.p = p;
    rep.root = ideals[0].root;
    rep.n = n;
    rep.s = s;
    rep.m = m;
    rep.mode = spec.describe();
    MomentSpec per = spec;
    per.seed = derive_seed(spec.seed, p);
    rep.lhs = moment_lhs(field, ideals[0], n, s, m, g, per);
    try {
      rep.stratified = moment_stratified(field, ideals[0], n, s, m, g);
    } catch (const CapExceeded&) {
    }
    rep.rhs_limit = rhs.value;
    rep.rhs_limit_without_zero = rhs.value_without_zero;
    rep.abs_error = std::abs(rep.lhs.value - rhs.value);
    rep.abs_error_without_zero = std::abs(rep.lhs.value_without_zero - rhs.value_without_zero);
    out.push_back(std::move(rep));
  }
  return out;
}

}  // namespace fixrank
