// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "fixrank/hecke.hpp"

using namespace fixrank;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double x) { return format_real(x); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Outcome moment_identity() {
  Outcome o;
  auto q = NumberField::rationals();
  struct Case {
    std::uint64_t p;
    std::size_t n, s, m;
  };
  std::ostringstream d;
  for (auto c : {Case{2, 2, 1, 1}, Case{2, 3, 2, 2}, Case{3, 3, 2, 2}})
    for (double r : {1.2, 1.5}) {
      auto start = Clock::now();
      auto g = TestFunction::ball(r);
      auto pr = make_prime(*q, c.p, 0);
      auto lhs = moment_lhs(q, pr, c.n, c.s, c.m, g, {});
      auto st = moment_stratified(q, pr, c.n, c.s, c.m, g);
      const double t = seconds_since(start);
      const bool ok = lhs.exact && *lhs.exact == st.value && *lhs.exact_without_zero == st.value_without_zero &&
                      t < 60;
      o.pass = o.pass && ok;
      d << "(p,n,s,m,R)=(" << c.p << "," << c.n << "," << c.s << "," << c.m << "," << r << ") lhs=" << to_string(*lhs.exact)
        << " stratified=" << to_string(st.value) << (ok ? "" : " MISMATCH") << "; ";
    }
  o.detail = d.str();
  return o;
}

Outcome counting_convergence() {
  Outcome o;
  auto start = Clock::now();
  auto q = NumberField::rationals();
  auto f = TestFunction::ball(1.0);
  std::ostringstream d;
  struct Run {
    std::size_t k;
    double t_small, t_large, tol;
  };
  for (auto r : {Run{1, 10, 40, 0.1}, Run{2, 4, 8, 0.2}}) {
    const double c1 = c1_estimate(q, 3, 2, r.k, f, 200).partial_sum;
    const double small = rel(lhs_count(q, 3, 2, r.k, r.t_small, f).normalized, c1);
    const double large = rel(lhs_count(q, 3, 2, r.k, r.t_large, f).normalized, c1);
    const bool ok = large <= r.tol && large < small;
    o.pass = o.pass && ok;
    d << "k=" << r.k << " c1=" << fmt(c1) << " rel(T=" << r.t_small << ")=" << fmt(small) << " rel(T=" << r.t_large
      << ")=" << fmt(large) << " tol " << r.tol << "; ";
  }
  const double t = seconds_since(start);
  o.pass = o.pass && t < 300;
  d << "time " << fmt(t) << " s";
  o.detail = d.str();
  return o;
}

Outcome decomposition() {
  Outcome o;
  auto q = NumberField::rationals();
  auto f = TestFunction::ball(1.0);
  std::ostringstream d;
  for (std::size_t k : {1u, 2u})
    for (double t : {2.0, 4.0}) {
      auto direct = lhs_count(q, 3, 2, k, t, f);
      auto split = decomposition_count(q, 3, 2, k, t, f);
      const bool ok = direct.exact_count && split.exact_count && *direct.exact_count == *split.exact_count;
      o.pass = o.pass && ok;
      d << "k=" << k << ",T=" << t << ": " << direct.exact_count->get_str() << " vs " << split.exact_count->get_str()
        << " over " << split.per_module.size() << " modules; ";
    }
  o.detail = d.str();
  return o;
}

Outcome zeta_identities() {
  Outcome o;
  auto start = Clock::now();
  std::ostringstream d;
  for (auto [n, m] : {std::pair<std::size_t, std::size_t>{4, 2}, {3, 2}}) {
    auto pz = primitive_zeta_check(n, m, 100);
    auto ko = koecher_identity_check(n, m, 100);
    const bool ok = pz.relative_error < 1e-3 && ko.relative_error < 1e-3;
    o.pass = o.pass && ok;
    d << "(n,m)=(" << n << "," << m << ") primitive-zeta rel " << fmt(pz.relative_error) << ", Koecher rel "
      << fmt(ko.relative_error) << " (tail-corrected " << fmt(pz.tail_corrected_error) << ")" << (ok ? "" : " ABOVE 1e-3")
      << "; ";
  }
  const double t = seconds_since(start);
  o.pass = o.pass && t < 60;
  d << "time " << fmt(t) << " s";
  o.detail = d.str();
  return o;
}

Outcome schmidt_window() {
  Outcome o;
  auto q = NumberField::rationals();
  std::ostringstream d;
  auto brute = [](long t) {
    std::size_t n = 0;
    for (long a = -t; a <= t; ++a)
      for (long b = -t; b <= t; ++b)
        if (a * a + b * b <= t * t && std::gcd(a, b) == 1) ++n;
    return n / 2;
  };
  for (long t : {5L, 10L, 20L}) {
    const std::size_t c1 = schmidt_count(q, 1, 2, static_cast<double>(t));
    const std::size_t c2 = schmidt_count(q, 1, 2, static_cast<double>(2 * t));
    const bool verified = c1 == brute(t) && c2 == brute(2 * t);
    const double ratio = static_cast<double>(c2) / static_cast<double>(c1);
    const bool ok = verified && ratio >= 2.5 && ratio <= 5.5;
    o.pass = o.pass && ok;
    d << "count(" << 2 * t << ")/count(" << t << ")=" << c2 << "/" << c1 << "=" << fmt(ratio)
      << (verified ? "" : " BRUTE MISMATCH") << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome unit_covolume() {
  Outcome o;
  double worst = 0;
  for (const char* name : {"Q", "Q(i)", "Q(sqrt5)"}) {
    auto k = field_preset(name);
    const std::size_t dd = k->degree();
    for (std::size_t r = 1; r <= 3; ++r) {
      worst = std::max(worst, std::abs(ZLattice::ok_power(*k, r).height() - 1));
      // Embedded basis: block diagonal copies of the embedding matrix.
      RatMatrix e(r * dd, r * dd);
      for (std::size_t b = 0; b < r; ++b)
        for (std::size_t i = 0; i < dd; ++i)
          for (std::size_t j = 0; j < dd; ++j) e(b * dd + i, b * dd + j) = rat_from_double(k->embedding()(i, j));
      worst = std::max(worst, std::abs(std::abs(to_double(determinant(e))) - 1));
    }
  }
  o.pass = worst <= 1e-10;
  o.detail = "max |covolume - 1| = " + fmt(worst) + " (exact Gram and embedded determinant)";
  return o;
}

Outcome neighbor_counts() {
  Outcome o;
  std::size_t built = 0;
  double worst = 0;
  std::ostringstream bad;
  auto run = [&](const FieldPtr& field, const PrimeIdealData& pr, std::size_t nmax) {
    for (std::size_t n = 1; n <= nmax; ++n)
      for (std::size_t s = 0; s <= n; ++s) {
        std::set<std::string> keys;
        for (const auto& sub : enumerate_subspaces(s, n, pr.p)) {
          auto l = hecke_neighbor(field, pr, sub);
          worst = std::max(worst, std::abs(l.lattice.height() - 1));
          keys.insert(l.lattice.to_json());
          ++built;
        }
        if (Int(static_cast<unsigned long>(keys.size())) != gaussian_binomial(s, n, pr.p)) {
          o.pass = false;
          bad << " count mismatch at p=" << pr.p << " n=" << n << " s=" << s;
        }
      }
  };
  auto q = NumberField::rationals();
  for (std::uint64_t p : {2u, 3u, 5u}) run(q, make_prime(*q, p, 0), 4);
  auto gi = field_preset("Q(i)");
  for (const auto& pr : degree_one_primes(*gi, 5)) run(gi, pr, 3);
  o.pass = o.pass && worst <= 1e-10;
  o.detail = std::to_string(built) + " neighbors over Q (p=2,3,5, n<=4) and Q(i) (p=5, n<=3); max |covolume - 1| = " +
             fmt(worst) + bad.str();
  return o;
}

Outcome moment_trend() {
  Outcome o;
  auto start = Clock::now();
  auto q = NumberField::rationals();
  auto g = TestFunction::ball(1.2);
  auto rhs = moment_rhs_limit(q, 3, 2, g, 60, 0, 0);
  auto at5 = moment_lhs(q, make_prime(*q, 5, 0), 3, 2, 2, g, {});
  MomentSpec sampled{MomentMode::sampled, 2000, 2024};
  auto at31 = moment_lhs(q, make_prime(*q, 31, 0), 3, 2, 2, g, sampled);
  const double e5 = std::abs(at5.value - rhs.value), e31 = std::abs(at31.value - rhs.value);
  const double t = seconds_since(start);
  o.pass = e31 < e5 && t < 600;
  o.detail = "rhs(cutoff 60)=" + fmt(rhs.value) + "; p=5 exact " + to_string(*at5.exact) + " err " + fmt(e5) +
             "; p=31 sampled(2000) " + fmt(at31.value) + " +- " + fmt(at31.std_error) + " err " + fmt(e31) +
             "; time " + fmt(t) + " s";
  return o;
}

Outcome containment_law() {
  Outcome o;
  double worst = 0;
  std::string where;
  for (std::uint64_t q : {2u, 3u, 5u, 7u, 11u, 13u})
    for (std::size_t n = 1; n <= 5; ++n)
      for (std::size_t s = 0; s <= n; ++s)
        for (std::size_t k = 0; k <= s; ++k) {
          const double scaled = std::abs(containment_law_error(k, s, n, q)) * static_cast<double>(q);
          if (scaled > worst) {
            worst = scaled;
            where = "q=" + std::to_string(q) + " k=" + std::to_string(k) + " s=" + std::to_string(s) +
                    " n=" + std::to_string(n);
          }
        }
  o.pass = worst <= 3;
  o.detail = "max q*|P*q^(k(n-s)) - 1| = " + fmt(worst) + " at " + where + " (bound 3)";
  return o;
}

Outcome invariant_suites() {
  Outcome o;
  std::size_t checks = 0, failures = 0;
  std::ostringstream d;
  auto check = [&](bool ok, const std::string& what) {
    ++checks;
    if (!ok) {
      ++failures;
      if (failures <= 5) d << " failed: " << what << ";";
    }
  };

  // Trijection, index, height and Jacobian identities.
  std::vector<PrimitiveModule> mods;
  auto q = NumberField::rationals();
  for (std::size_t k : {1u, 2u}) {
    auto more = enumerate_primitive_modules(q, k, 3, 4.0);
    mods.insert(mods.end(), more.begin(), more.end());
  }
  for (const char* name : {"Q(i)", "Q(sqrt5)"}) {
    auto more = enumerate_primitive_modules(field_preset(name), 1, 2, 2.5);
    mods.insert(mods.end(), more.begin(), more.end());
  }
  for (const auto& p : mods) {
    const FieldPtr& field = p.echelon.entries.field();
    const std::string key = p.echelon.key();
    check(echelon_of_module(field, p.lattice) == p.echelon, "round trip " + key);
    check(lambda_of(echelon_of_module(field, p.lattice)).lattice.basis() == p.lattice.basis(), "lambda " + key);
    check(jacobian_ratio(p) == Rat(p.denominator * p.denominator), "jacobian " + key);
    check(height_sq(p.echelon) == p.height_sq, "height " + key);
    for (std::size_t n : {1u, 2u, 3u}) {
      check(row_index(p, n) == int_pow(p.denominator, n), "index " + key);
      const double hn = std::pow(p.height, static_cast<double>(n));
      check(std::abs(orthogonal_power(p.lattice, n).height() - hn) <= 1e-10 * hn, "H^n " + key);
    }
  }

  // Random integral lattices: Hadamard, Minkowski and short vectors against ambient brute force.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t r = 2 + trial % 3;
    IntMatrix b(r, r);
    do {
      for (auto& x : b.data()) x = static_cast<long>(rng() % 9) - 4;
    } while (determinant(b) == 0);
    ZLattice l = ZLattice::from_int_basis(b, RatMatrix::identity(r));
    check(hadamard_ratio(l) >= 1 - 1e-12, "hadamard");
    const double bound = minkowski_constant(r) * std::pow(l.height(), 1.0 / static_cast<double>(r));
    auto pts = short_vectors_with_norms(l, SquaredBound::from_radius(bound));
    check(pts.size() > 1, "minkowski first minimum");
    const long radius = 3;
    std::size_t brute = 0;
    std::vector<long> x(r, -radius);
    for (;;) {
      long sq = 0;
      for (long v : x) sq += v * v;
      if (sq <= radius * radius) {
        RatVector v;
        for (long c : x) v.push_back(Rat(c));
        brute += l.contains(v);
      }
      std::size_t i = 0;
      while (i < r && x[i] == radius) x[i++] = -radius;
      if (i == r) break;
      ++x[i];
    }
    check(short_vectors(l, static_cast<double>(radius)).size() == brute, "short vectors");
  }

  // Rank drop: every 2 x 2 integral matrix with norm at most 10.
  std::size_t drops = 0;
  for (std::uint64_t p : {2u, 3u, 5u}) {
    auto pr = make_prime(*q, p, 0);
    for (int a = -10; a <= 10; ++a)
      for (int b = -10; b <= 10; ++b)
        for (int c = -10; c <= 10; ++c)
          for (int e = -10; e <= 10; ++e) {
            if (a * a + b * b + c * c + e * e > 100) continue;
            auto rep = rank_drop_check(FieldMatrix::from_rationals(q, RatMatrix{{Rat(a), Rat(b)}, {Rat(c), Rat(e)}}), pr);
            drops += rep.dropped;
            check(rep.bound_satisfied, "rank drop");
          }
  }
  o.pass = failures == 0;
  o.detail = std::to_string(checks) + " checks, " + std::to_string(failures) + " failures (" + std::to_string(mods.size()) +
             " modules, 40 random lattices, " + std::to_string(drops) + " rank drops)" + d.str();
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "exact finite-p moment identity", moment_identity},
      {2, "counting-theorem convergence", counting_convergence},
      {3, "decomposition identity", decomposition},
      {4, "primitive-zeta and Koecher identities at cutoff 100", zeta_identities},
      {5, "Schmidt growth window", schmidt_window},
      {6, "unit covolume of O_K^r", unit_covolume},
      {7, "Hecke covolume and neighbor count", neighbor_counts},
      {8, "moment convergence trend", moment_trend},
      {9, "containment leading-order law", containment_law},
      {10, "invariant suites", invariant_suites},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
