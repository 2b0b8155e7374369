#include "fixrank/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <functional>
#include <map>
#include <set>

#include "fixrank/core/errors.hpp"
#include "fixrank/core/parallel.hpp"

namespace fixrank {

namespace {

IntMatrix clear_row_denominators(const RatMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int den = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) den = lcm(den, m(i, j).get_den());
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = Rat(m(i, j) * den).get_num();
  }
  return out;
}

Int primitive_gcd(const IntVector& v) {
  Int g = 0;
  for (const auto& x : v) g = gcd(g, x);
  return g;
}

bool canonical_sign(const IntVector& v) {
  for (const auto& x : v)
    if (x != 0) return x > 0;
  return false;
}

// Nonzero O_K elements with basis coefficients in {-1, 0, 1}, one per sign class.
std::vector<IntVector> small_multipliers(std::size_t d) {
  std::vector<IntVector> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= 3;
  for (std::size_t code = 1; code < total; ++code) {
    IntVector x(d);
    std::size_t c = code;
    for (std::size_t i = 0; i < d; ++i, c /= 3) x[i] = static_cast<long>(c % 3) - 1;
    if (canonical_sign(x)) out.push_back(std::move(x));
  }
  return out;
}

IntVector times_element(const NumberField& field, const IntVector& v, const IntVector& x) {
  IntVector out(v.size());
  for (std::size_t t = 0; t < x.size(); ++t) {
    if (x[t] == 0) continue;
    IntVector w = multiply_by_basis(field, v, t);
    for (std::size_t i = 0; i < v.size(); ++i) out[i] += x[t] * w[i];
  }
  return out;
}

// Translates x*l of an earlier minimum, with G*(x*l) and q(x*l) cached.
struct Shift {
  IntVector g_image;
  Int q;
};

std::vector<Shift> shifts_of(const NumberField& field, const IntMatrix& gram, const IntVector& l,
                             const std::vector<IntVector>& mults) {
  std::vector<Shift> out;
  for (const auto& x : mults) {
    IntVector y = times_element(field, l, x);
    IntVector gy(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0) gy[i] += gram(i, j) * y[j];
    Int q = 0;
    for (std::size_t i = 0; i < y.size(); ++i) q += gy[i] * y[i];
    out.push_back({std::move(gy), std::move(q)});
  }
  return out;
}

// A K-minimum v cannot be shortened by subtracting multiples of earlier minima.
bool is_reduced(const IntVector& v, const std::vector<std::vector<Shift>>& shifts) {
  for (const auto& level : shifts)
    for (const auto& s : level) {
      Int b = 0;
      for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0) b += s.g_image[i] * v[i];
      if (s.q < 2 * abs(b)) return false;
    }
  return true;
}

}  // namespace

EchelonMatrix to_echelon(const FieldMatrix& m) {
  std::vector<std::size_t> piv;
  FieldMatrix r = rref_over_k(m, &piv);
  if (piv.size() < m.rows()) throw ValidationError("matrix does not have full row rank over K");
  return {std::move(r), std::move(piv)};
}

RatMatrix echelon_map(const EchelonMatrix& d) {
  const NumberField& k = *d.entries.field();
  const std::size_t deg = k.degree();
  RatMatrix phi(0, d.m() * deg);
  for (std::size_t i = 0; i < d.k(); ++i) {
    RatVector row = d.entries.row_coords(i);
    for (std::size_t t = 0; t < deg; ++t) phi.append_row(multiply_by_basis(k, row, t));
  }
  return phi;
}

Int denominator(const EchelonMatrix& d) {
  RatMatrix phi = echelon_map(d);
  Int q = common_denominator(phi);
  IntMatrix scaled(phi.rows(), phi.cols());
  for (std::size_t i = 0; i < phi.rows(); ++i)
    for (std::size_t j = 0; j < phi.cols(); ++j) scaled(i, j) = Rat(phi(i, j) * q).get_num();
  SnfResult snf = smith_normal_form(scaled);
  Int idx = 1;
  for (std::size_t i = 0; i < phi.rows(); ++i) idx *= q / gcd(q, snf.diagonal[i]);
  return idx;
}

PrimitiveModule lambda_of(const EchelonMatrix& d) {
  const FieldPtr& field = d.entries.field();
  RatMatrix phi = echelon_map(d);
  IntMatrix sat = saturate_rows(clear_row_denominators(phi));
  ZLattice lat = ZLattice::ok_power(*field, d.m()).with_basis(to_rat(sat));
  auto h2 = lat.height_sq().exact();
  if (!h2) throw DomainError("module height is not rational");
  PrimitiveModule p{d, std::move(lat), *h2, std::sqrt(to_double(*h2)), denominator(d)};
  return p;
}

Rat height_sq(const EchelonMatrix& d) {
  const NumberField& field = *d.entries.field();
  RatMatrix phi = echelon_map(d);
  RatMatrix form = to_rat(block_diagonal(field.trace_gram(), d.m()));
  Int den = denominator(d);
  Rat radicand = determinant(phi * form * phi.transpose()) * den * den;
  auto h2 = (field.norm_scale().pow(Rat(static_cast<long>(phi.rows()))) * ScaleFactor(radicand)).exact();
  if (!h2) throw DomainError("module height is not rational");
  return *h2;
}

EchelonMatrix echelon_of_module(const FieldPtr& shared, const ZLattice& l) {
  const NumberField& field = *shared;
  const std::size_t deg = field.degree();
  if (l.ambient_dim() % deg != 0) throw ValidationError("ambient dimension is not a multiple of the degree");
  const std::size_t m = l.ambient_dim() / deg;
  if (!is_ok_stable(field, l)) throw ValidationError("lattice is not an O_K-module");
  if (l.rank() % deg != 0) throw ValidationError("Z-rank is not a multiple of the degree");
  ZLattice amb = ZLattice::ok_power(field, m);
  if (saturation_index(l, amb) != 1) throw ValidationError("module is not primitive");
  std::vector<RatVector> rows;
  for (std::size_t i = 0; i < l.rank(); ++i) rows.push_back(l.basis().row_vector(i));
  std::vector<std::size_t> piv;
  FieldMatrix r = rref_over_k(FieldMatrix::from_row_coords(shared, rows, m), &piv);
  const std::size_t k = piv.size();
  if (k * deg != l.rank()) throw ValidationError("module rank is inconsistent");
  FieldMatrix e(shared, k, m);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < m; ++j) e.at(i, j) = r.at(i, j);
  return {std::move(e), std::move(piv)};
}

double minima_product_constant(std::size_t k, std::size_t d) {
  double r = static_cast<double>(k * d);
  return std::pow(2.0, r * (r - 1.0) / 4.0);
}

std::vector<PrimitiveModule> enumerate_primitive_modules(const FieldPtr& field, std::size_t k, std::size_t m,
                                                         double height_bound) {
  if (k < 1 || k > m) throw ValidationError("need 1 <= k <= m");
  if (!(height_bound > 0)) throw ValidationError("height bound must be positive");
  const std::size_t deg = field->degree();
  Rat hb = rat_from_double(height_bound);
  Rat hb2 = hb * hb;
  std::vector<PrimitiveModule> out;
  if (k == m) {
    auto p = lambda_of(to_echelon(FieldMatrix::identity(field, m)));
    if (p.height_sq <= hb2) out.push_back(std::move(p));
    return out;
  }

  const double c = minima_product_constant(k, deg);
  const double ct = c * height_bound * (1 + 1e-12);
  const double mu = successive_k_minima(*field, ZLattice::ok_power(*field, 1), 1).norms[0];
  const double radius = std::pow(ct, 1.0 / static_cast<double>(deg)) / std::pow(mu, static_cast<double>(k - 1));
  ZLattice amb = ZLattice::ok_power(*field, m);

  struct Cand {
    IntVector v;
    Rat q;
    double normd;
  };
  std::vector<Cand> cands;
  for (auto& p : short_vectors_with_norms(amb, SquaredBound::from_radius(radius * (1 + 1e-12)))) {
    if (p.sq_norm == 0 || !canonical_sign(p.coords) || primitive_gcd(p.coords) != 1) continue;
    double nd = std::pow(amb.twisted_norm(p.sq_norm), static_cast<double>(deg));
    cands.push_back({std::move(p.coords), p.sq_norm, nd});
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.q != b.q) return a.q < b.q;
    return a.v < b.v;
  });

  const std::vector<IntVector> mults = small_multipliers(deg);
  const RatMatrix& form = amb.gram();
  const Int form_den = common_denominator(form);
  IntMatrix int_form(form.rows(), form.cols());
  for (std::size_t i = 0; i < form.rows(); ++i)
    for (std::size_t j = 0; j < form.cols(); ++j) int_form(i, j) = Rat(form(i, j) * form_den).get_num();
  std::vector<std::map<std::string, PrimitiveModule>> found(cands.size());
  parallel_for(cands.size(), [&](std::size_t first) {
    if (std::pow(cands[first].normd, static_cast<double>(k)) > ct) return;
    std::vector<RatVector> chosen{to_rat(cands[first].v)};
    std::vector<std::vector<Shift>> shifts{shifts_of(*field, int_form, cands[first].v, mults)};
    std::set<std::string> seen;
    auto& sink = found[first];
    std::function<void(std::size_t, double)> dfs = [&](std::size_t start, double prod) {
      if (chosen.size() == k) {
        auto e = to_echelon(FieldMatrix::from_row_coords(field, chosen, m));
        std::string key = e.key();
        if (!seen.insert(key).second || height_sq(e) > hb2) return;
        sink.emplace(std::move(key), lambda_of(e));
        return;
      }
      const double left = static_cast<double>(k - chosen.size());
      for (std::size_t idx = start; idx < cands.size(); ++idx) {
        if (prod * std::pow(cands[idx].normd, left) > ct) break;
        if (!is_reduced(cands[idx].v, shifts)) continue;
        chosen.push_back(to_rat(cands[idx].v));
        if (k_rank(*field, chosen) == chosen.size()) {
          if (chosen.size() < k) shifts.push_back(shifts_of(*field, int_form, cands[idx].v, mults));
          dfs(idx + 1, prod * cands[idx].normd);
          if (chosen.size() < k) shifts.pop_back();
        }
        chosen.pop_back();
      }
    };
    dfs(first + 1, cands[first].normd);
  });

  std::map<std::string, PrimitiveModule> merged;
  for (auto& f : found)
    for (auto& [key, p] : f) merged.emplace(key, std::move(p));
  for (auto& [key, p] : merged) out.push_back(std::move(p));
  std::stable_sort(out.begin(), out.end(), [](const PrimitiveModule& a, const PrimitiveModule& b) {
    if (a.height_sq != b.height_sq) return a.height_sq < b.height_sq;
    return a.echelon.key() < b.echelon.key();
  });
  return out;
}

std::size_t schmidt_count(const FieldPtr& field, std::size_t k, std::size_t m, double height_bound) {
  return enumerate_primitive_modules(field, k, m, height_bound).size();
}

std::vector<IntMatrix> matrices_with_rows(std::size_t n, const PrimitiveModule& p, double radius) {
  ZLattice big = orthogonal_power(p.lattice, n);
  const std::size_t r = p.lattice.rank();
  IntMatrix basis = p.lattice.int_basis();
  std::vector<IntMatrix> out;
  for (const auto& coords : short_vectors(big, radius)) {
    IntMatrix a(n, basis.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t t = 0; t < r; ++t) {
        const Int& c = coords[i * r + t];
        if (c == 0) continue;
        for (std::size_t j = 0; j < basis.cols(); ++j) a(i, j) += c * basis(t, j);
      }
    out.push_back(std::move(a));
  }
  return out;
}

Rat jacobian_ratio(const PrimitiveModule& p) {
  RatMatrix phi = echelon_map(p.echelon);
  Rat image = determinant(phi * p.lattice.ambient_form() * phi.transpose());
  return p.lattice.gram_det() / image;
}

Int row_index(const PrimitiveModule& p, std::size_t n) {
  RatMatrix a = block_diagonal(echelon_map(p.echelon), n);
  RatMatrix b = block_diagonal(p.lattice.basis(), n);
  auto x = solve_left(a, b);
  if (!x) throw DomainError("M_n(Lambda_D) is not inside M_{n x k}(O_K) D");
  SnfResult snf = smith_normal_form(to_int(*x));
  Int idx = 1;
  for (const auto& e : snf.diagonal) idx *= e;
  return abs(idx);
}

std::string module_json(const PrimitiveModule& p) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < p.echelon.k(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < p.echelon.m(); ++c) {
      nlohmann::ordered_json e = nlohmann::ordered_json::array();
      for (const auto& x : p.echelon.entries.at(i, c).coords()) e.push_back(to_string(x));
      row.push_back(e);
    }
    rows.push_back(row);
  }
  j["D"] = rows;
  j["pivots"] = p.echelon.pivot_cols;
  j["H"] = format_real(p.height);
  j["H_sq"] = to_string(p.height_sq);
  if (p.denominator.fits_ulong_p())
    j["denominator"] = p.denominator.get_ui();
  else
    j["denominator"] = p.denominator.get_str();
  return j.dump();
}

}  // namespace fixrank
