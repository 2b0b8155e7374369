#include "fixrank/counting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>

#include "fixrank/core/errors.hpp"
#include "fixrank/core/parallel.hpp"

namespace fixrank {

// ---- test functions ----

TestFunction TestFunction::ball(double r) {
  if (!(r > 0)) throw ValidationError("ball radius must be positive");
  TestFunction f;
  f.kind = TestKind::ball;
  f.radius = r;
  return f;
}

TestFunction TestFunction::product_of_balls(double r) {
  if (!(r > 0)) throw ValidationError("ball radius must be positive");
  TestFunction f;
  f.kind = TestKind::product_of_balls;
  f.radius = r;
  return f;
}

TestFunction TestFunction::custom(double support_radius, MatrixEvaluator eval) {
  if (!(support_radius > 0)) throw ValidationError("support radius must be positive");
  if (!eval) throw ValidationError("custom test function needs an evaluator");
  TestFunction f;
  f.kind = TestKind::custom;
  f.custom_support = support_radius;
  f.evaluator = std::move(eval);
  return f;
}

double TestFunction::support_radius(std::size_t m) const {
  switch (kind) {
    case TestKind::ball:
      return radius;
    case TestKind::product_of_balls:
      return radius * std::sqrt(static_cast<double>(m));
    case TestKind::custom:
      return custom_support;
  }
  return 0;
}

double TestFunction::operator()(const EmbeddedMatrix& x, std::size_t d) const {
  if (kind == TestKind::custom) return evaluator(x);
  const double r2 = radius * radius;
  if (kind == TestKind::ball) {
    double s = 0;
    for (double v : x.data()) s += v * v;
    return s <= r2 ? 1.0 : 0.0;
  }
  const std::size_t m = x.cols() / d;
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0;
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t t = 0; t < d; ++t) s += x(i, j * d + t) * x(i, j * d + t);
    if (s > r2) return 0.0;
  }
  return 1.0;
}

std::string TestFunction::name() const {
  switch (kind) {
    case TestKind::ball:
      return "ball:" + format_real(radius);
    case TestKind::product_of_balls:
      return "product_of_balls:" + format_real(radius);
    case TestKind::custom:
      return "custom:" + format_real(custom_support);
  }
  return "";
}

TestFunction parse_test_function(const std::string& text) {
  auto colon = text.find(':');
  std::string kind = text.substr(0, colon);
  double r = 1.0;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      r = std::stod(text.substr(colon + 1), &used);
      if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("bad test function radius in '" + text + "'");
    }
  }
  if (kind == "ball") return TestFunction::ball(r);
  if (kind == "product_of_balls" || kind == "product") return TestFunction::product_of_balls(r);
  throw ValidationError("unknown test function '" + text + "' (expected ball:R or product_of_balls:R)");
}

// ---- rank factorization ----

std::size_t rank_over_K(const FieldMatrix& a) { return rank_over_k(a); }

RankFactorization rank_factorize(const FieldMatrix& a) {
  std::vector<std::size_t> piv;
  FieldMatrix r = rref_over_k(a, &piv);
  if (piv.empty()) throw ValidationError("cannot factorize the zero matrix");
  const std::size_t k = piv.size();
  FieldMatrix d(a.field(), k, a.cols());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) d.at(i, j) = r.at(i, j);
  FieldMatrix c(a.field(), a.rows(), k);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t t = 0; t < k; ++t) c.at(i, t) = a.at(i, piv[t]);
  return {std::move(c), EchelonMatrix{std::move(d), std::move(piv)}};
}

// ---- shared helpers ----

namespace {

void check_shape(std::size_t n, std::size_t m, std::size_t k) {
  if (!(n > m && m >= k && k >= 1)) throw ValidationError("need n > m >= k >= 1");
}

// Upper bound on the untwisted form value that can pass the exact twisted test.
Rat untwisted_cap(const ScaleFactor& scale, const Rat& bound) {
  return rat_from_double(to_double(bound) / scale.value() * (1 + 1e-9)) + Rat(1, 1000000);
}

struct RowSet {
  std::vector<IntVector> v;
  std::vector<Rat> q;
  std::vector<std::vector<Rat>> col_q;  // per-column form values, product kinds only

  // Number of leading entries with scale * (used + q) <= bound.
  std::size_t count_within(const ScaleFactor& scale, const Rat& used, const Rat& bound) const {
    std::size_t lo = 0, hi = q.size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (scale.compare_scaled(used + q[mid], bound) <= 0)
        lo = mid + 1;
      else
        hi = mid;
    }
    return lo;
  }

  bool contains(const IntVector& x, const Rat& qx) const {
    auto lo = std::lower_bound(q.begin(), q.end(), qx) - q.begin();
    for (auto i = static_cast<std::size_t>(lo); i < q.size() && q[i] == qx; ++i)
      if (v[i] == x) return true;
    return false;
  }
};

std::vector<Rat> column_values(const IntMatrix& gram, std::size_t d, const IntVector& v) {
  const std::size_t m = v.size() / d;
  std::vector<Rat> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    Int s = 0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) s += v[j * d + a] * gram(a, b) * v[j * d + b];
    out[j] = Rat(s);
  }
  return out;
}

// Lattice vectors (in ambient coordinates) with twisted squared norm <= bound, sorted by (q, coords).
RowSet collect_rows(const NumberField& field, const ZLattice& l, const Rat& bound, bool with_columns) {
  const ScaleFactor& scale = l.scale_sq();
  IntMatrix basis = l.int_basis();
  std::vector<std::pair<Rat, IntVector>> pts;
  for (auto& p : short_vectors_untwisted(l, untwisted_cap(scale, bound))) {
    if (scale.compare_scaled(p.sq_norm, bound) > 0) continue;
    IntVector amb(basis.cols());
    for (std::size_t t = 0; t < p.coords.size(); ++t) {
      if (p.coords[t] == 0) continue;
      for (std::size_t j = 0; j < basis.cols(); ++j) amb[j] += p.coords[t] * basis(t, j);
    }
    pts.emplace_back(std::move(p.sq_norm), std::move(amb));
  }
  std::sort(pts.begin(), pts.end());
  RowSet out;
  for (auto& [q, v] : pts) {
    if (with_columns) out.col_q.push_back(column_values(field.trace_gram(), field.degree(), v));
    out.q.push_back(std::move(q));
    out.v.push_back(std::move(v));
  }
  return out;
}

class SpanCache {
 public:
  SpanCache(FieldPtr field, std::size_t m, Rat bound, bool with_columns)
      : field_(std::move(field)), m_(m), bound_(std::move(bound)), with_columns_(with_columns) {}

  std::shared_ptr<const RowSet> get(const std::vector<RatVector>& span) {
    EchelonMatrix e = to_echelon(FieldMatrix::from_row_coords(field_, span, m_));
    std::string key = e.key();
    {
      std::lock_guard<std::mutex> lock(mutex_);
      auto it = sets_.find(key);
      if (it != sets_.end()) return it->second;
    }
    auto p = lambda_of(e);
    auto set = std::make_shared<const RowSet>(collect_rows(*field_, p.lattice, bound_, with_columns_));
    std::lock_guard<std::mutex> lock(mutex_);
    return sets_.emplace(std::move(key), std::move(set)).first->second;
  }

 private:
  FieldPtr field_;
  std::size_t m_;
  Rat bound_;
  bool with_columns_;
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const RowSet>> sets_;
};

struct Tally {
  Int count = 0;
  double sum = 0;
  std::uint64_t seen = 0;
};

EmbeddedMatrix embed_rows(const NumberField& field, const std::vector<const IntVector*>& rows, double inv_t) {
  const std::size_t d = field.degree();
  const auto& e = field.embedding();
  const std::size_t width = rows.front()->size();
  EmbeddedMatrix x(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t b = 0; b * d < width; ++b)
      for (std::size_t t = 0; t < d; ++t) {
        const Int& c = (*rows[i])[b * d + t];
        if (c == 0) continue;
        double cv = c.get_d() * inv_t;
        for (std::size_t s = 0; s < d; ++s) x(i, b * d + s) += cv * e(t, s);
      }
  return x;
}

// Row-by-row enumeration of rank-k matrices under the Frobenius support bound.
class RowSearch {
 public:
  RowSearch(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k, double T, const TestFunction& f,
            const ScaleFactor& scale, const Rat& bound, const Rat& col_bound, const RowSet& full, SpanCache& cache)
      : field_(field),
        n_(n),
        m_(m),
        k_(k),
        inv_t_(1.0 / T),
        f_(f),
        scale_(scale),
        bound_(bound),
        col_bound_(col_bound),
        full_(full),
        cache_(cache) {}

  Tally run_from(std::size_t first) {
    tally_ = Tally{};
    const IntVector& v = full_.v[first];
    bool zero = std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; });
    used_ = full_.q[first];
    if (f_.kind == TestKind::product_of_balls) cols_ = full_.col_q[first];
    rows_ = {&v};
    span_.clear();
    lists_.assign(1, nullptr);
    if (!zero) {
      span_.push_back(to_rat(v));
      lists_.push_back(nullptr);
    }
    if (span_.size() + (n_ - 1) >= k_) visit(1);
    return tally_;
  }

 private:
  const RowSet& span_list() {
    auto& slot = lists_[span_.size()];
    if (!slot) slot = cache_.get(span_);
    return *slot;
  }

  bool columns_ok(const std::vector<Rat>& extra) const {
    for (std::size_t j = 0; j < m_; ++j)
      if (scale_.compare_scaled(cols_[j] + extra[j], col_bound_) > 0) return false;
    return true;
  }

  void leaf() {
    ++tally_.seen;
    if (f_.kind == TestKind::custom) {
      tally_.sum += f_(embed_rows(*field_, rows_, inv_t_), field_->degree());
    } else {
      tally_.count += 1;
      tally_.sum += 1;
    }
  }

  void push(const RowSet& set, std::size_t idx) {
    rows_.push_back(&set.v[idx]);
    used_ += set.q[idx];
    if (f_.kind == TestKind::product_of_balls)
      for (std::size_t j = 0; j < m_; ++j) cols_[j] += set.col_q[idx][j];
  }

  void pop(const RowSet& set, std::size_t idx) {
    rows_.pop_back();
    used_ -= set.q[idx];
    if (f_.kind == TestKind::product_of_balls)
      for (std::size_t j = 0; j < m_; ++j) cols_[j] -= set.col_q[idx][j];
  }

  void visit(std::size_t i) {
    const std::size_t r = span_.size();
    const bool last = i + 1 == n_;
    if (r + (n_ - i) < k_) return;
    if (last && f_.kind == TestKind::ball) {
      std::size_t c = 0;
      if (r == k_) {
        c = span_list().count_within(scale_, used_, bound_);
      } else if (r + 1 == k_) {
        std::size_t inside = r == 0 ? 1 : span_list().count_within(scale_, used_, bound_);
        c = full_.count_within(scale_, used_, bound_) - inside;
      }
      tally_.count += c;
      tally_.sum += static_cast<double>(c);
      tally_.seen += c;
      return;
    }
    if (r == k_) {
      span_list();
      auto hold = lists_[r];
      const RowSet& set = *hold;
      for (std::size_t idx = 0; idx < set.q.size(); ++idx) {
        if (scale_.compare_scaled(used_ + set.q[idx], bound_) > 0) break;
        if (f_.kind == TestKind::product_of_balls && !columns_ok(set.col_q[idx])) continue;
        push(set, idx);
        if (last)
          leaf();
        else
          visit(i + 1);
        pop(set, idx);
      }
      return;
    }
    std::shared_ptr<const RowSet> hold;
    if (r > 0) {
      span_list();
      hold = lists_[r];
    }
    for (std::size_t idx = 0; idx < full_.q.size(); ++idx) {
      if (scale_.compare_scaled(used_ + full_.q[idx], bound_) > 0) break;
      const IntVector& v = full_.v[idx];
      bool in_span = r == 0 ? std::all_of(v.begin(), v.end(), [](const Int& x) { return x == 0; })
                            : hold->contains(v, full_.q[idx]);
      const std::size_t nr = r + (in_span ? 0 : 1);
      if (nr + (n_ - i - 1) < k_) continue;
      if (last && nr != k_) continue;
      if (f_.kind == TestKind::product_of_balls && !columns_ok(full_.col_q[idx])) continue;
      push(full_, idx);
      if (!in_span) {
        span_.push_back(to_rat(v));
        lists_.push_back(nullptr);
      }
      if (last)
        leaf();
      else
        visit(i + 1);
      if (!in_span) {
        span_.pop_back();
        lists_.pop_back();
      }
      pop(full_, idx);
    }
  }

  const FieldPtr& field_;
  std::size_t n_, m_, k_;
  double inv_t_;
  const TestFunction& f_;
  const ScaleFactor& scale_;
  const Rat& bound_;
  const Rat& col_bound_;
  const RowSet& full_;
  SpanCache& cache_;

  Tally tally_;
  Rat used_;
  std::vector<Rat> cols_;
  std::vector<const IntVector*> rows_;
  std::vector<RatVector> span_;
  std::vector<std::shared_ptr<const RowSet>> lists_;
};

struct Bounds {
  Rat total;   // squared Frobenius support bound
  Rat column;  // squared per-column bound for product kinds
};

Bounds bounds_for(const TestFunction& f, std::size_t m, double T) {
  Rat t = rat_from_double(T);
  Bounds b;
  if (f.kind == TestKind::custom) {
    Rat s = rat_from_double(f.custom_support);
    b.total = s * s * t * t;
  } else {
    Rat r = rat_from_double(f.radius);
    b.column = r * r * t * t;
    b.total = f.kind == TestKind::ball ? b.column : b.column * static_cast<long>(m);
  }
  return b;
}

// Evaluates f on a matrix whose rows are already known to be inside the support bound.
double evaluate_exact(const FieldPtr& field, const TestFunction& f, const ScaleFactor& scale, const Bounds& b,
                      const std::vector<const IntVector*>& rows, double T, bool* indicator_hit) {
  if (f.kind == TestKind::custom) {
    *indicator_hit = false;
    return f(embed_rows(*field, rows, 1.0 / T), field->degree());
  }
  if (f.kind == TestKind::product_of_balls) {
    const std::size_t d = field->degree();
    std::vector<Rat> cols(rows.front()->size() / d);
    for (const auto* row : rows) {
      auto c = column_values(field->trace_gram(), d, *row);
      for (std::size_t j = 0; j < cols.size(); ++j) cols[j] += c[j];
    }
    for (const auto& c : cols)
      if (scale.compare_scaled(c, b.column) > 0) {
        *indicator_hit = false;
        return 0.0;
      }
  }
  *indicator_hit = true;
  return 1.0;
}

void finish_report(RankCountReport& rep, const TestFunction& f, const Tally& t, std::size_t n, std::size_t k,
                   std::size_t d) {
  rep.raw_sum = f.is_indicator() ? t.count.get_d() : t.sum;
  if (f.is_indicator()) rep.exact_count = t.count;
  rep.matrices_seen = t.seen;
  rep.normalized = rep.raw_sum / std::pow(rep.T, static_cast<double>(k * n * d));
}

}  // namespace

RankCountReport lhs_count(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k, double T,
                          const TestFunction& f, CountStrategy strategy) {
  check_shape(n, m, k);
  if (!(T >= 1)) throw ValidationError("T must be >= 1");
  const std::size_t d = field->degree();
  const Bounds b = bounds_for(f, m, T);
  const ScaleFactor& scale = field->norm_scale();
  RankCountReport rep;
  rep.T = T;

  if (strategy == CountStrategy::automatic) {
    double est = ball_count_estimate(ZLattice::ok_power(*field, n * m), f.support_radius(m) * T);
    strategy = est <= 2e5 ? CountStrategy::brute : CountStrategy::pruned;
  }

  Tally total;
  if (strategy == CountStrategy::brute) {
    rep.strategy = "brute";
    ZLattice big = ZLattice::ok_power(*field, n * m);
    const std::size_t width = m * d;
    for (auto& p : short_vectors_untwisted(big, untwisted_cap(scale, b.total))) {
      if (scale.compare_scaled(p.sq_norm, b.total) > 0) continue;
      std::vector<IntVector> rows(n);
      std::vector<RatVector> rrows(n);
      for (std::size_t i = 0; i < n; ++i) {
        rows[i].assign(p.coords.begin() + static_cast<long>(i * width),
                       p.coords.begin() + static_cast<long>((i + 1) * width));
        rrows[i] = to_rat(rows[i]);
      }
      if (k_rank(*field, rrows) != k) continue;
      std::vector<const IntVector*> ptrs;
      for (const auto& r : rows) ptrs.push_back(&r);
      bool hit = false;
      double v = evaluate_exact(field, f, scale, b, ptrs, T, &hit);
      ++total.seen;
      total.sum += v;
      if (hit) total.count += 1;
    }
  } else {
    rep.strategy = "pruned";
    const bool columns = f.kind == TestKind::product_of_balls;
    RowSet full = collect_rows(*field, ZLattice::ok_power(*field, m), b.total, columns);
    SpanCache cache(field, m, b.total, columns);
    std::vector<Tally> slots(full.q.size());
    parallel_for(full.q.size(), [&](std::size_t first) {
      RowSearch search(field, n, m, k, T, f, scale, b.total, b.column, full, cache);
      slots[first] = search.run_from(first);
    });
    for (const auto& s : slots) {
      total.count += s.count;
      total.sum += s.sum;
      total.seen += s.seen;
    }
  }
  finish_report(rep, f, total, n, k, d);
  return rep;
}

namespace {

// max over embeddings of |sigma(u_t)| for each integral basis element.
std::vector<double> basis_sup_norms(const NumberField& field) {
  const std::size_t d = field.degree();
  std::vector<double> out(d);
  for (std::size_t t = 0; t < d; ++t) {
    RatVector e(d);
    e[t] = 1;
    RatVector pc = field.to_power_coords(e);
    double best = 0;
    for (const auto& root : field.roots()) {
      std::complex<double> acc = 0, pw = 1;
      for (std::size_t i = 0; i < d; ++i) {
        acc += to_double(pc[i]) * pw;
        pw *= root;
      }
      best = std::max(best, std::abs(acc));
    }
    out[t] = best;
  }
  return out;
}

}  // namespace

DecompositionReport decomposition_count(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k,
                                        double T, const TestFunction& f) {
  check_shape(n, m, k);
  if (!(T >= 1)) throw ValidationError("T must be >= 1");
  const std::size_t d = field->degree();
  const Bounds b = bounds_for(f, m, T);
  const ScaleFactor& scale = field->norm_scale();
  // H(Lambda_D) <= prod_t sup|u_t|^k * prod_i |a_i|^d over k independent rows a_i.
  double units = 1;
  for (double s : basis_sup_norms(*field)) units *= s;
  const double bsq = to_double(b.total);
  const double hmax = std::pow(units, static_cast<double>(k)) *
                      std::pow(bsq / static_cast<double>(k), static_cast<double>(k * d) / 2.0) * (1 + 1e-9);

  DecompositionReport rep;
  rep.height_bound = hmax;
  auto mods = enumerate_primitive_modules(field, k, m, hmax);
  std::vector<Tally> slots(mods.size());
  parallel_for(mods.size(), [&](std::size_t idx) {
    const PrimitiveModule& p = mods[idx];
    ZLattice big = orthogonal_power(p.lattice, n);
    IntMatrix basis = p.lattice.int_basis();
    const std::size_t r = p.lattice.rank();
    Tally t;
    for (auto& pt : short_vectors_untwisted(big, untwisted_cap(scale, b.total))) {
      if (scale.compare_scaled(pt.sq_norm, b.total) > 0) continue;
      std::vector<IntVector> rows(n, IntVector(basis.cols()));
      std::vector<RatVector> rrows(n);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t s = 0; s < r; ++s) {
          const Int& c = pt.coords[i * r + s];
          if (c == 0) continue;
          for (std::size_t j = 0; j < basis.cols(); ++j) rows[i][j] += c * basis(s, j);
        }
        rrows[i] = to_rat(rows[i]);
      }
      if (k_rank(*field, rrows) != k) continue;
      std::vector<const IntVector*> ptrs;
      for (const auto& row : rows) ptrs.push_back(&row);
      bool hit = false;
      double v = evaluate_exact(field, f, scale, b, ptrs, T, &hit);
      ++t.seen;
      t.sum += v;
      if (hit) t.count += 1;
    }
    slots[idx] = std::move(t);
  });
  Tally total;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    total.count += slots[i].count;
    total.sum += slots[i].sum;
    if (slots[i].seen > 0)
      rep.per_module.push_back({mods[i].echelon.key(), mods[i].height_sq,
                                f.is_indicator() ? slots[i].count.get_d() : slots[i].sum});
  }
  rep.raw_sum = f.is_indicator() ? total.count.get_d() : total.sum;
  if (f.is_indicator()) rep.exact_count = total.count;
  return rep;
}

// ---- series side ----

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(index));
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

namespace {

Matrix<double> invert(const Matrix<double>& a) {
  const std::size_t n = a.rows();
  Matrix<double> m = a, inv = Matrix<double>::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m(i, c)) > std::abs(m(p, c))) p = i;
    if (m(p, c) == 0) throw PrecisionError("singular embedding matrix");
    m.swap_rows(p, c);
    inv.swap_rows(p, c);
    const double piv = m(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      m(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || m(i, c) == 0) continue;
      const double f = m(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        m(i, j) -= f * m(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

bool pivot_only(const EchelonMatrix& e) {
  for (std::size_t i = 0; i < e.k(); ++i)
    for (std::size_t j = 0; j < e.m(); ++j)
      if (j != e.pivot_cols[i] && !e.entries.at(i, j).is_zero()) return false;
  return true;
}

}  // namespace

TermValue term_value(const PrimitiveModule& p, std::size_t n, const TestFunction& f, std::uint64_t mc_samples,
                     std::uint64_t seed, TermMethod method) {
  const NumberField& field = *p.echelon.entries.field();
  const std::size_t d = field.degree(), k = p.echelon.k(), m = p.echelon.m();
  if (n <= m) throw ValidationError("need n > m");
  TermValue out;
  if (method == TermMethod::automatic) {
    if (f.kind == TestKind::ball) {
      const double dim = static_cast<double>(k * n * d);
      out.value = ball_volume(dim) * std::pow(f.radius, dim) / std::pow(p.height, static_cast<double>(n));
      out.closed_form = true;
      return out;
    }
    if (f.kind == TestKind::product_of_balls && pivot_only(p.echelon)) {
      const double dim = static_cast<double>(n * d);
      out.value = std::pow(ball_volume(dim) * std::pow(f.radius, dim), static_cast<double>(k));
      out.closed_form = true;
      return out;
    }
    if (f.kind == TestKind::product_of_balls && d == 1 && k == 1) {
      // Every column of xD is a multiple of x; the largest |D_l| is the binding one.
      double widest = 0;
      for (std::size_t l = 0; l < m; ++l)
        widest = std::max(widest, std::abs(to_double(p.echelon.entries.at(0, l).coords()[0])));
      const double nd = static_cast<double>(n);
      out.value = ball_volume(nd) * std::pow(f.radius / widest, nd) / std::pow(p.denominator.get_d(), nd);
      out.closed_form = true;
      return out;
    }
  }
  if (mc_samples == 0) throw ValidationError("Monte Carlo term needs mc_samples > 0");

  const Matrix<double>& emb = field.embedding();
  const Matrix<double> emb_inv = invert(emb);
  // Embedded action of each entry D_jl: row vector y -> y * act[j][l].
  std::vector<std::vector<Matrix<double>>> act(k, std::vector<Matrix<double>>(m));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t l = 0; l < m; ++l) {
      RatMatrix mult = field.mult_matrix(p.echelon.entries.at(j, l).basis_coords());
      Matrix<double> md(d, d);
      for (std::size_t a = 0; a < d; ++a)
        for (std::size_t c = 0; c < d; ++c) md(a, c) = to_double(mult(a, c));
      act[j][l] = emb_inv * md * emb;
    }

  const double rho = f.support_radius(m);
  const std::size_t dim = n * k * d;
  std::mt19937_64 rng(seed);
  double mean = 0, m2 = 0;
  EmbeddedMatrix x(n, m * d);
  std::vector<double> y(dim);
  for (std::uint64_t s = 0; s < mc_samples; ++s) {
    for (auto& c : y) c = (2 * unit_uniform(rng()) - 1) * rho;
    std::fill(x.data().begin(), x.data().end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const double* yij = &y[(i * k + j) * d];
        for (std::size_t l = 0; l < m; ++l) {
          const Matrix<double>& a = act[j][l];
          for (std::size_t c = 0; c < d; ++c) {
            double acc = 0;
            for (std::size_t t = 0; t < d; ++t) acc += yij[t] * a(t, c);
            x(i, l * d + c) += acc;
          }
        }
      }
    const double v = f(x, d);
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  const double box = std::pow(2 * rho, static_cast<double>(dim));
  const double den_n = std::pow(p.denominator.get_d(), static_cast<double>(n));
  const double var = mc_samples > 1 ? m2 / static_cast<double>(mc_samples - 1) : 0.0;
  out.value = box * mean / den_n;
  out.std_error = box * std::sqrt(var / static_cast<double>(mc_samples)) / den_n;
  out.samples = mc_samples;
  return out;
}

C1Estimate c1_estimate(const FieldPtr& field, std::size_t n, std::size_t m, std::size_t k, const TestFunction& f,
                       double height_cutoff, std::uint64_t mc_samples, std::uint64_t seed) {
  check_shape(n, m, k);
  if (!(height_cutoff >= 1)) throw ValidationError("height cutoff must be >= 1");
  C1Estimate est;
  est.n = n;
  est.m = m;
  est.k = k;
  est.cutoff = height_cutoff;
  auto mods = enumerate_primitive_modules(field, k, m, height_cutoff);
  std::vector<TermValue> values(mods.size());
  parallel_for(mods.size(), [&](std::size_t i) {
    values[i] = term_value(mods[i], n, f, mc_samples, derive_seed(seed, i));
  });
  const double low_cut = height_cutoff / 10.0;
  double low_sum = 0, var = 0;
  for (std::size_t i = 0; i < mods.size(); ++i) {
    est.partial_sum += values[i].value;
    var += values[i].std_error * values[i].std_error;
    if (mods[i].height <= low_cut) low_sum += values[i].value;
    bool zero_column = false;
    for (std::size_t l = 0; l < m; ++l) {
      bool all_zero = true;
      for (std::size_t r = 0; r < k; ++r) all_zero = all_zero && mods[i].echelon.entries.at(r, l).is_zero();
      zero_column = zero_column || all_zero;
    }
    est.terms.push_back({mods[i].echelon.key(), mods[i].height_sq, mods[i].denominator, zero_column, values[i]});
  }
  est.std_error = std::sqrt(var);
  est.term_count = mods.size();
  const double e = static_cast<double>(m) - static_cast<double>(n);
  const double decade = est.partial_sum - low_sum;
  if (decade > 0) {
    const double c = decade / (std::pow(low_cut, e) - std::pow(height_cutoff, e));
    est.tail_estimate = std::max(0.0, c * std::pow(height_cutoff, e));
  }
  return est;
}

double zeta(double s) {
  if (!(s > 1)) throw ValidationError("zeta needs s > 1");
  const int N = 64;
  long double sum = 0;
  for (int j = N - 1; j >= 1; --j) sum += std::pow(static_cast<long double>(j), -static_cast<long double>(s));
  const long double n = N, ls = s;
  // Euler-Maclaurin for sum_{j >= N} j^-s with Bernoulli terms through B_8.
  long double tail = std::pow(n, 1 - ls) / (ls - 1) + std::pow(n, -ls) / 2;
  long double rising = ls;
  long double pw = std::pow(n, -ls - 1);
  const long double coef[] = {1.0L / 12, -1.0L / 720, 1.0L / 30240, -1.0L / 1209600};
  for (int i = 0; i < 4; ++i) {
    tail += coef[i] * rising * pw;
    rising *= (ls + 2 * i + 1) * (ls + 2 * i + 2);
    pw /= n * n;
  }
  return static_cast<double>(sum + tail);
}

namespace {

struct ZetaSums {
  long double all = 0;
  long double primitive = 0;
  std::size_t count = 0;
};

ZetaSums integer_sums(std::size_t n, std::size_t m, double cutoff) {
  Rat qb = rat_from_double(cutoff);
  qb *= qb;
  auto pts = short_vectors_untwisted(ZLattice::standard(m), qb);
  std::sort(pts.begin(), pts.end(), [](const LatticePoint& a, const LatticePoint& b) { return a.sq_norm > b.sq_norm; });
  ZetaSums s;
  for (const auto& p : pts) {
    if (p.sq_norm == 0 || p.sq_norm > qb) continue;
    long double term = std::pow(static_cast<long double>(to_double(p.sq_norm)), -static_cast<long double>(n) / 2);
    s.all += term;
    Int g = 0;
    for (const auto& c : p.coords) g = gcd(g, c);
    if (g == 1) s.primitive += term;
    ++s.count;
  }
  return s;
}

// Integral approximation of sum_{|v| > cutoff} |v|^-n over Z^m minus 0.
double lattice_tail(std::size_t n, std::size_t m, double cutoff) {
  const double md = static_cast<double>(m), nd = static_cast<double>(n);
  return md * ball_volume(md) * std::pow(cutoff, md - nd) / (nd - md);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

IdentityCheck primitive_zeta_check(std::size_t n, std::size_t m, double cutoff) {
  if (!(n > m && m >= 1)) throw ValidationError("need n > m >= 1");
  if (!(cutoff >= 1)) throw ValidationError("cutoff must be >= 1");
  ZetaSums s = integer_sums(n, m, cutoff);
  const double zn = zeta(static_cast<double>(n));
  IdentityCheck out;
  out.lhs = static_cast<double>(s.primitive) * zn;
  out.rhs = static_cast<double>(s.all);
  out.relative_error = rel(out.lhs, out.rhs);
  const double tail = lattice_tail(n, m, cutoff);
  const double prim_tail = m >= 2 ? tail / zeta(static_cast<double>(m)) : 0.0;
  out.tail_corrected_error = rel((static_cast<double>(s.primitive) + prim_tail) * zn, out.rhs + tail);
  out.term_count = s.count;
  return out;
}

IdentityCheck koecher_identity_check(std::size_t n, std::size_t m, double cutoff) {
  if (!(n > m && m >= 1)) throw ValidationError("need n > m >= 1");
  if (!(cutoff >= 1)) throw ValidationError("cutoff must be >= 1");
  auto q = NumberField::rationals();
  C1Estimate series = c1_estimate(q, n, m, 1, TestFunction::ball(1.0), cutoff);
  ZetaSums s = integer_sums(n, m, cutoff);
  const double zn = zeta(static_cast<double>(n));
  const double vn = ball_volume(static_cast<double>(n));
  IdentityCheck out;
  out.lhs = series.partial_sum;
  out.rhs = vn * 0.5 * static_cast<double>(s.all) / zn;
  out.relative_error = rel(out.lhs, out.rhs);
  const double tail = lattice_tail(n, m, cutoff);
  const double prim_tail = m >= 2 ? tail / zeta(static_cast<double>(m)) : 0.0;
  out.tail_corrected_error = rel(out.lhs + vn * 0.5 * prim_tail, out.rhs + vn * 0.5 * tail / zn);
  out.term_count = series.term_count;
  return out;
}

}  // namespace fixrank
