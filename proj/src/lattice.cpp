#include "fixrank/lattice.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <sstream>

#include "fixrank/core/errors.hpp"
#include "fixrank/core/parallel.hpp"

namespace fixrank {

namespace {

std::atomic<double> g_enumeration_cap{2.0e7};

RatMatrix gram_of(const RatMatrix& basis, const RatMatrix& form) {
  return basis * form * basis.transpose();
}

bool lex_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Int& x, const Int& y) { return cmp(x, y) < 0; });
}

bool lex_less(const RatVector& a, const RatVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Rat& x, const Rat& y) { return cmp(x, y) < 0; });
}

}  // namespace

SquaredBound SquaredBound::from_radius(double radius) {
  if (!(radius >= 0) || !std::isfinite(radius)) throw ValidationError("radius must be finite and >= 0");
  Rat r = rat_from_double(radius);
  return {r * r};
}

// ---- ZLattice ----

ZLattice::ZLattice(RatMatrix basis, RatMatrix ambient_form, ScaleFactor scale_sq)
    : basis_(std::move(basis)), form_(std::move(ambient_form)), scale_sq_(std::move(scale_sq)) {
  if (form_.rows() != basis_.cols() || form_.cols() != basis_.cols())
    throw ValidationError("ambient form does not match the basis width");
  gram_ = gram_of(basis_, form_);
  if (basis_.rows() > 0 && !is_positive_definite(gram_))
    throw ValidationError("basis rows are dependent or the form is not positive definite");
  gram_det_ = basis_.rows() > 0 ? determinant(gram_) : Rat(1);
  gram_den_ = common_denominator(gram_);
  int_gram_ = IntMatrix(gram_.rows(), gram_.cols());
  for (std::size_t i = 0; i < gram_.rows(); ++i)
    for (std::size_t j = 0; j < gram_.cols(); ++j) int_gram_(i, j) = Rat(gram_(i, j) * gram_den_).get_num();
}

ZLattice ZLattice::standard(std::size_t n) {
  return ZLattice(RatMatrix::identity(n), RatMatrix::identity(n));
}

ZLattice ZLattice::ok_power(const NumberField& field, std::size_t m) {
  const std::size_t n = m * field.degree();
  return ZLattice(RatMatrix::identity(n), to_rat(block_diagonal(field.trace_gram(), m)), field.norm_scale());
}

ZLattice ZLattice::from_int_basis(const IntMatrix& basis, const RatMatrix& ambient_form, ScaleFactor scale_sq) {
  return ZLattice(to_rat(basis), ambient_form, std::move(scale_sq));
}

bool ZLattice::integral_basis() const { return common_denominator(basis_) == 1; }

IntMatrix ZLattice::int_basis() const { return to_int(basis_); }

ScaleFactor ZLattice::height_sq() const {
  return scale_sq_.pow(Rat(static_cast<long>(rank()))) * ScaleFactor(gram_det_);
}

double ZLattice::log_height() const { return 0.5 * height_sq().log_value(); }

double ZLattice::height() const { return std::exp(log_height()); }

Rat ZLattice::coord_sq_norm(const IntVector& x) const {
  Int s = 0;
  const std::size_t r = x.size();
  for (std::size_t i = 0; i < r; ++i) {
    if (x[i] == 0) continue;
    Int t = 0;
    for (std::size_t j = 0; j < r; ++j)
      if (x[j] != 0) t += int_gram_(i, j) * x[j];
    s += x[i] * t;
  }
  return Rat(s, gram_den_);
}

Rat ZLattice::ambient_sq_norm(const RatVector& v) const { return bilinear(v, form_, v); }

double ZLattice::twisted_norm(const Rat& untwisted_sq) const {
  if (untwisted_sq == 0) return 0.0;
  double q = std::log(to_double(untwisted_sq));
  return std::exp(0.5 * (q + scale_sq_.log_value()));
}

RatVector ZLattice::ambient_vector(const IntVector& coords) const {
  RatVector v(ambient_dim());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += coords[i] * basis_(i, j);
  }
  return v;
}

std::optional<IntVector> ZLattice::coordinates_of(const RatVector& v) const {
  if (v.size() != ambient_dim()) throw ValidationError("vector has wrong ambient dimension");
  if (rank() == 0) {
    for (const auto& x : v)
      if (x != 0) return std::nullopt;
    return IntVector{};
  }
  RatMatrix b(1, v.size());
  for (std::size_t j = 0; j < v.size(); ++j) b(0, j) = v[j];
  auto x = solve_left(basis_, b);
  if (!x) return std::nullopt;
  IntVector out;
  for (std::size_t i = 0; i < rank(); ++i) {
    if (!is_integral((*x)(0, i))) return std::nullopt;
    out.push_back((*x)(0, i).get_num());
  }
  return out;
}

ZLattice ZLattice::with_basis(RatMatrix basis) const { return ZLattice(std::move(basis), form_, scale_sq_); }

ZLattice ZLattice::with_scale(ScaleFactor scale_sq) const {
  ZLattice l = *this;
  l.scale_sq_ = std::move(scale_sq);
  return l;
}

std::string ZLattice::to_json() const {
  nlohmann::ordered_json j;
  auto mat = [](const RatMatrix& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(to_string(m(i, c)));
      rows.push_back(row);
    }
    return rows;
  };
  j["basis"] = mat(basis_);
  j["gram"] = mat(gram_);
  j["scale_sq_num"] = to_string(scale_sq_.coefficient());
  nlohmann::ordered_json pows = nlohmann::ordered_json::array();
  for (const auto& [b, e] : scale_sq_.powers()) pows.push_back({{"base", b.get_str()}, {"exp", to_string(e)}});
  j["scale_sq_den_pow"] = pows;
  j["rank"] = rank();
  j["ambient_dim"] = ambient_dim();
  return j.dump();
}

ZLattice orthogonal_power(const ZLattice& l, std::size_t n) {
  return ZLattice(block_diagonal(l.basis(), n), block_diagonal(l.ambient_form(), n), l.scale_sq());
}

// ---- LLL ----

IntMatrix lll_gram(const RatMatrix& g0, const Rat& delta) {
  const std::size_t n = g0.rows();
  IntMatrix u = IntMatrix::identity(n);
  if (n <= 1) return u;
  RatMatrix g = g0;
  RatMatrix mu(n, n);
  RatVector b(n);
  auto gso_from = [&](std::size_t from) {
    for (std::size_t i = from; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        Rat s = g(i, j);
        for (std::size_t t = 0; t < j; ++t) s -= mu(j, t) * mu(i, t) * b[t];
        mu(i, j) = s / b[j];
      }
      Rat s = g(i, i);
      for (std::size_t t = 0; t < i; ++t) s -= mu(i, t) * mu(i, t) * b[t];
      b[i] = s;
    }
  };
  const Rat half(1, 2);
  auto size_reduce = [&](std::size_t k, std::size_t j) {
    if (abs(mu(k, j)) <= half) return;
    Int q = round_rat(mu(k, j));
    for (std::size_t t = 0; t < n; ++t) g(k, t) -= q * g(j, t);
    for (std::size_t t = 0; t < n; ++t) g(t, k) -= q * g(t, j);
    for (std::size_t t = 0; t < n; ++t) u(k, t) -= q * u(j, t);
    mu(k, j) -= q;
    for (std::size_t t = 0; t < j; ++t) mu(k, t) -= q * mu(j, t);
  };
  gso_from(0);
  std::size_t k = 1;
  while (k < n) {
    size_reduce(k, k - 1);
    if (b[k] < (delta - mu(k, k - 1) * mu(k, k - 1)) * b[k - 1]) {
      g.swap_rows(k, k - 1);
      for (std::size_t t = 0; t < n; ++t) std::swap(g(t, k), g(t, k - 1));
      u.swap_rows(k, k - 1);
      gso_from(k - 1);
      k = std::max<std::size_t>(1, k - 1);
    } else {
      for (std::size_t j = k - 1; j-- > 0;) size_reduce(k, j);
      ++k;
    }
  }
  return u;
}

LllResult lll_reduce(const ZLattice& l, const Rat& delta) {
  if (!(delta > Rat(1, 4) && delta < 1)) throw ValidationError("LLL delta must lie in (1/4, 1)");
  IntMatrix u = lll_gram(l.gram(), delta);
  return {l.with_basis(to_rat(u) * l.basis()), u};
}

// ---- enumeration ----

void set_enumeration_cap(double max_points) { g_enumeration_cap.store(max_points); }
double enumeration_cap() { return g_enumeration_cap.load(); }

double ball_volume(double s) {
  return std::exp(0.5 * s * std::log(M_PI) - std::lgamma(0.5 * s + 1.0));
}

double minkowski_constant(std::size_t r) { return std::pow(2.0, 0.5 * static_cast<double>(r)); }

namespace {

struct Enumerator {
  std::size_t r;
  std::vector<double> diag;
  std::vector<std::vector<double>> lower;  // lower[j][i] for j > i
  double qmax;

  void run(std::size_t i, double rem, std::vector<long>& y, std::vector<std::vector<long>>& out) const {
    double c = 0;
    for (std::size_t j = i + 1; j < r; ++j) c -= static_cast<double>(y[j]) * lower[j][i];
    double half = std::sqrt(std::max(rem, 0.0) / diag[i]);
    double eps = 1e-9 * (1.0 + half);
    long lo = static_cast<long>(std::ceil(c - half - eps));
    long hi = static_cast<long>(std::floor(c + half + eps));
    for (long v = lo; v <= hi; ++v) {
      double t = static_cast<double>(v) - c;
      double next = rem - diag[i] * t * t;
      if (next < -1e-9 * (1.0 + qmax)) continue;
      y[i] = v;
      if (i == 0)
        out.push_back(y);
      else
        run(i - 1, next, y, out);
    }
    y[i] = 0;
  }
};

std::vector<LatticePoint> enumerate_reduced(const ZLattice& l, const IntMatrix& u, double qmax_float,
                                            const std::function<bool(const Rat&)>& accept) {
  const std::size_t r = l.rank();
  RatMatrix gred = to_rat(u) * l.gram() * to_rat(u).transpose();
  RatMatrix lo;
  RatVector d;
  if (!ldl_decompose(gred, lo, d)) throw DomainError("Gram matrix is singular");
  Enumerator en;
  en.r = r;
  en.qmax = qmax_float;
  en.diag.resize(r);
  en.lower.assign(r, std::vector<double>(r, 0.0));
  for (std::size_t i = 0; i < r; ++i) {
    en.diag[i] = to_double(d[i]);
    for (std::size_t j = 0; j < r; ++j) en.lower[i][j] = to_double(lo(i, j));
  }
  const std::size_t top = r - 1;
  double half = std::sqrt(qmax_float / en.diag[top]);
  long lo_v = static_cast<long>(std::ceil(-half - 1e-9));
  long hi_v = static_cast<long>(std::floor(half + 1e-9));
  const std::size_t slots = static_cast<std::size_t>(hi_v - lo_v + 1);
  std::vector<std::vector<LatticePoint>> parts(slots);
  parallel_for(slots, [&](std::size_t s) {
    long v = lo_v + static_cast<long>(s);
    double rem = qmax_float - en.diag[top] * static_cast<double>(v) * static_cast<double>(v);
    if (rem < -1e-9 * (1.0 + qmax_float)) return;
    std::vector<long> y(r, 0);
    y[top] = v;
    std::vector<std::vector<long>> raw;
    if (top == 0)
      raw.push_back(y);
    else
      en.run(top - 1, rem, y, raw);
    for (const auto& yy : raw) {
      IntVector x(r);
      for (std::size_t i = 0; i < r; ++i) {
        if (yy[i] == 0) continue;
        for (std::size_t j = 0; j < r; ++j) x[j] += yy[i] * u(i, j);
      }
      Rat q = l.coord_sq_norm(x);
      if (accept(q)) parts[s].push_back({std::move(x), std::move(q)});
    }
  });
  std::vector<LatticePoint> out;
  for (auto& p : parts)
    for (auto& x : p) out.push_back(std::move(x));
  std::sort(out.begin(), out.end(), [](const LatticePoint& a, const LatticePoint& b) { return lex_less(a.coords, b.coords); });
  return out;
}

double estimate_with(const ZLattice& l, const IntMatrix& u, double radius) {
  const std::size_t r = l.rank();
  double scale = l.scale_sq().value();
  RatMatrix gred = to_rat(u) * l.gram() * to_rat(u).transpose();
  double rho = 0;
  for (std::size_t i = 0; i < r; ++i) rho += 0.5 * std::sqrt(scale * to_double(gred(i, i)));
  double logest = std::log(2.0 * ball_volume(static_cast<double>(r))) +
                  static_cast<double>(r) * std::log(radius + rho) - l.log_height();
  return std::exp(logest);
}

void check_cap(double estimate, const ZLattice& l, double radius) {
  if (estimate > enumeration_cap()) {
    std::ostringstream msg;
    msg << "enumeration of rank-" << l.rank() << " lattice at radius " << radius << " predicts about "
        << estimate << " points, above the cap " << enumeration_cap();
    throw CapExceeded(msg.str(), estimate);
  }
}

}  // namespace

double ball_count_estimate(const ZLattice& l, double radius) {
  if (l.rank() == 0) return 1.0;
  return estimate_with(l, lll_gram(l.gram()), radius);
}

std::vector<LatticePoint> short_vectors_with_norms(const ZLattice& l, const SquaredBound& bound) {
  if (bound.value < 0) throw ValidationError("negative squared radius");
  if (l.rank() == 0) return {LatticePoint{IntVector{}, Rat(0)}};
  IntMatrix u = lll_gram(l.gram());
  double radius = std::sqrt(to_double(bound.value));
  check_cap(estimate_with(l, u, radius), l, radius);
  double qmax = to_double(bound.value) / l.scale_sq().value();
  qmax = qmax * (1.0 + 1e-9) + 1e-12;
  const ScaleFactor& s = l.scale_sq();
  return enumerate_reduced(l, u, qmax,
                           [&](const Rat& q) { return s.compare_scaled(q, bound.value) <= 0; });
}

std::vector<IntVector> short_vectors(const ZLattice& l, double radius) {
  auto pts = short_vectors_with_norms(l, SquaredBound::from_radius(radius));
  std::vector<IntVector> out;
  out.reserve(pts.size());
  for (auto& p : pts) out.push_back(std::move(p.coords));
  return out;
}

std::vector<LatticePoint> short_vectors_untwisted(const ZLattice& l, const Rat& qbound) {
  if (l.rank() == 0) return {LatticePoint{IntVector{}, Rat(0)}};
  IntMatrix u = lll_gram(l.gram());
  double radius = std::sqrt(to_double(qbound) * l.scale_sq().value());
  check_cap(estimate_with(l, u, radius), l, radius);
  double qmax = to_double(qbound) * (1.0 + 1e-9) + 1e-12;
  return enumerate_reduced(l, u, qmax, [&](const Rat& q) { return q <= qbound; });
}

// ---- saturation and bounds ----

namespace {

IntMatrix coords_in(const ZLattice& sub, const ZLattice& ambient) {
  IntMatrix x(0, ambient.rank());
  for (std::size_t i = 0; i < sub.rank(); ++i) {
    auto c = ambient.coordinates_of(sub.basis().row_vector(i));
    if (!c) throw ValidationError("sublattice is not contained in the ambient lattice");
    x.append_row(*c);
  }
  return x;
}

}  // namespace

ZLattice saturate(const ZLattice& sub, const ZLattice& ambient) {
  if (sub.ambient_dim() != ambient.ambient_dim()) throw ValidationError("lattices live in different spaces");
  IntMatrix x = coords_in(sub, ambient);
  if (x.rows() == 0) return ambient.with_basis(RatMatrix(0, ambient.ambient_dim()));
  IntMatrix s = saturate_rows(x);
  return ambient.with_basis(to_rat(s) * ambient.basis());
}

Int saturation_index(const ZLattice& sub, const ZLattice& ambient) {
  IntMatrix x = coords_in(sub, ambient);
  if (x.rows() == 0) return 1;
  SnfResult snf = smith_normal_form(x);
  Int idx = 1;
  for (const auto& d : snf.diagonal) idx *= d;
  return idx;
}

double covering_radius_bound(const ZLattice& l) {
  if (l.rank() == 0) return 0.0;
  LllResult red = lll_reduce(l);
  double s = 0;
  for (std::size_t i = 0; i < l.rank(); ++i) s += red.lattice.twisted_norm(red.lattice.gram()(i, i));
  return 0.5 * s;
}

double hadamard_ratio(const ZLattice& l) {
  double logp = 0;
  for (std::size_t i = 0; i < l.rank(); ++i) logp += std::log(l.twisted_norm(l.gram()(i, i)));
  return std::exp(logp - l.log_height());
}

// ---- O_K-modules ----

IntVector multiply_by_basis(const NumberField& field, const IntVector& v, std::size_t t) {
  const std::size_t d = field.degree();
  const IntMatrix& m = field.mult_matrices()[t];
  IntVector out(v.size());
  for (std::size_t b = 0; b * d < v.size(); ++b)
    for (std::size_t i = 0; i < d; ++i) {
      const Int& x = v[b * d + i];
      if (x == 0) continue;
      for (std::size_t j = 0; j < d; ++j) out[b * d + j] += x * m(i, j);
    }
  return out;
}

RatVector multiply_by_basis(const NumberField& field, const RatVector& v, std::size_t t) {
  const std::size_t d = field.degree();
  const IntMatrix& m = field.mult_matrices()[t];
  RatVector out(v.size());
  for (std::size_t b = 0; b * d < v.size(); ++b)
    for (std::size_t i = 0; i < d; ++i) {
      const Rat& x = v[b * d + i];
      if (x == 0) continue;
      for (std::size_t j = 0; j < d; ++j) out[b * d + j] += x * m(i, j);
    }
  return out;
}

std::size_t k_rank(const NumberField& field, const std::vector<RatVector>& vectors) {
  if (vectors.empty()) return 0;
  const std::size_t d = field.degree();
  RatMatrix m(0, vectors.front().size());
  for (const auto& v : vectors)
    for (std::size_t t = 0; t < d; ++t) m.append_row(multiply_by_basis(field, v, t));
  return rank(m) / d;
}

bool is_ok_stable(const NumberField& field, const ZLattice& l) {
  for (std::size_t i = 0; i < l.rank(); ++i)
    for (std::size_t t = 1; t < static_cast<std::size_t>(field.degree()); ++t)
      if (!l.contains(multiply_by_basis(field, l.basis().row_vector(i), t))) return false;
  return true;
}

double projection_norm(const NumberField& field, const ZLattice& shape, const RatVector& x, const RatVector& y) {
  const std::size_t d = field.degree();
  RatMatrix w(0, y.size());
  for (std::size_t t = 0; t < d; ++t) w.append_row(multiply_by_basis(field, y, t));
  RatMatrix gw = w * shape.ambient_form() * w.transpose();
  RatVector b(d);
  for (std::size_t t = 0; t < d; ++t) b[t] = bilinear(x, shape.ambient_form(), w.row_vector(t));
  auto inv = inverse(gw);
  if (!inv) throw DomainError("projection onto a zero vector");
  Rat q = bilinear(b, *inv, b);
  return shape.twisted_norm(q);
}

MinimaReport successive_k_minima(const NumberField& field, const ZLattice& module, std::size_t k) {
  if (k == 0) throw ValidationError("k must be positive");
  if (!is_ok_stable(field, module)) throw ValidationError("lattice is not closed under O_K");
  std::vector<RatVector> rows;
  for (std::size_t i = 0; i < module.rank(); ++i) rows.push_back(module.basis().row_vector(i));
  if (k_rank(field, rows) < k) throw ValidationError("module has O_K-rank below k");

  RatMatrix u = to_rat(lll_gram(module.gram()));
  RatMatrix gred = u * module.gram() * u.transpose();
  Rat bound = 0;
  for (std::size_t i = 0; i < gred.rows(); ++i) bound = std::max(bound, gred(i, i));

  for (;;) {
    auto pts = short_vectors_untwisted(module, bound);
    struct Cand {
      RatVector amb;
      Rat q;
    };
    std::vector<Cand> cands;
    for (auto& p : pts)
      if (p.sq_norm != 0) cands.push_back({module.ambient_vector(p.coords), p.sq_norm});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
      if (a.q != b.q) return a.q < b.q;
      return lex_less(b.amb, a.amb);
    });
    MinimaReport rep;
    std::vector<RatVector> chosen;
    for (const auto& c : cands) {
      chosen.push_back(c.amb);
      if (k_rank(field, chosen) < chosen.size()) {
        chosen.pop_back();
        continue;
      }
      rep.sq_norms.push_back(c.q);
      if (chosen.size() == k) break;
    }
    if (chosen.size() < k) {
      bound *= 4;
      continue;
    }
    for (std::size_t i = 0; i < k; ++i) {
      rep.vectors.push_back(chosen[i]);
      rep.norms.push_back(module.twisted_norm(rep.sq_norms[i]));
    }
    for (std::size_t i = 0; i < k; ++i) {
      RatMatrix span(0, module.ambient_dim());
      for (std::size_t t = 0; t < static_cast<std::size_t>(field.degree()); ++t)
        span.append_row(multiply_by_basis(field, chosen[i], t));
      double rho = covering_radius_bound(module.with_basis(span));
      for (std::size_t j = i + 1; j < k; ++j)
        rep.projections_ok.push_back(projection_norm(field, module, chosen[j], chosen[i]) <= rho * (1 + 1e-12));
    }
    return rep;
  }
}

}  // namespace fixrank
