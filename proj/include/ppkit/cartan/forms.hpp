#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/exactalg/poly.hpp"

namespace ppkit {

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(std::size_t n) : c_(n, Poly(n)) {}
  explicit VectorField(std::vector<Poly> coeffs) : c_(std::move(coeffs)) {
    for (const auto& p : c_) {
      if (p.nvars() != c_.size()) throw std::invalid_argument("VectorField: coefficient arity mismatch");
    }
  }

  static VectorField coordinate(std::size_t n, std::size_t i) {
    VectorField v(n);
    v.c_[i] = Poly::constant(n, 1);
    return v;
  }

  std::size_t n() const { return c_.size(); }
  const std::vector<Poly>& coeffs() const { return c_; }
  const Poly& operator[](std::size_t i) const { return c_[i]; }
  Poly& operator[](std::size_t i) { return c_[i]; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Poly& p) { return p.is_zero(); });
  }

  Poly apply(const Poly& f) const {
    Poly out(n());
    for (std::size_t i = 0; i < n(); ++i) {
      if (!c_[i].is_zero()) out += c_[i] * f.derivative(i);
    }
    return out;
  }

  std::vector<Q> evaluate(std::span<const Q> point) const {
    std::vector<Q> v;
    v.reserve(n());
    for (const auto& p : c_) v.push_back(p.evaluate(point));
    return v;
  }

  VectorField& operator+=(const VectorField& o) {
    for (std::size_t i = 0; i < n(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    for (std::size_t i = 0; i < n(); ++i) c_[i] -= o.c_[i];
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(const Poly& f, VectorField v) {
    for (auto& p : v.c_) p = f * p;
    return v;
  }
  friend VectorField operator*(const Q& s, VectorField v) {
    for (auto& p : v.c_) p *= s;
    return v;
  }
  friend bool operator==(const VectorField&, const VectorField&) = default;

  std::string to_string(std::span<const std::string> names = {}) const {
    std::string s;
    for (std::size_t i = 0; i < n(); ++i) {
      if (c_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      std::string var = i < names.size() ? names[i] : "x" + std::to_string(i);
      s += "(" + c_[i].to_string(names) + ")*d/d" + var;
    }
    return s.empty() ? "0" : s;
  }

 private:
  std::vector<Poly> c_;
};

inline VectorField lie_bracket(const VectorField& X, const VectorField& Y) {
  if (X.n() != Y.n()) throw std::invalid_argument("lie_bracket: dimension mismatch");
  VectorField out(X.n());
  for (std::size_t i = 0; i < X.n(); ++i) out[i] = X.apply(Y[i]) - Y.apply(X[i]);
  return out;
}

// An R^k-valued r-form on R^n: k tables from increasing index tuples to coefficients.
class KForm {
 public:
  using Index = std::vector<std::size_t>;
  using Table = std::map<Index, Poly>;

  KForm() = default;
  KForm(std::size_t n, std::size_t r, std::size_t k) : n_(n), r_(r), comps_(k) {}

  static KForm zero(std::size_t n, std::size_t r, std::size_t k) { return KForm(n, r, k); }

  // Degree-0 form from k functions.
  static KForm functions(std::vector<Poly> fs) {
    if (fs.empty()) throw std::invalid_argument("KForm::functions: empty tuple");
    KForm w(fs.front().nvars(), 0, fs.size());
    for (std::size_t j = 0; j < fs.size(); ++j) w.add(j, {}, fs[j]);
    return w;
  }

  // Degree-1 form from a k×n table of coefficients.
  static KForm one_form(const std::vector<std::vector<Poly>>& rows) {
    if (rows.empty()) throw std::invalid_argument("KForm::one_form: empty tuple");
    std::size_t n = rows.front().size();
    KForm w(n, 1, rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
      for (std::size_t i = 0; i < n; ++i) w.add(j, {i}, rows[j][i]);
    }
    return w;
  }

  std::size_t n() const { return n_; }
  std::size_t r() const { return r_; }
  std::size_t k() const { return comps_.size(); }
  const Table& component(std::size_t j) const { return comps_[j]; }

  bool is_zero() const {
    return std::all_of(comps_.begin(), comps_.end(), [](const Table& t) { return t.empty(); });
  }

  Poly coeff(std::size_t j, const Index& idx) const {
    auto it = comps_[j].find(idx);
    return it == comps_[j].end() ? Poly(n_) : it->second;
  }

  // Adds f·dx_{idx[0]}∧…; idx need not be sorted.
  void add(std::size_t j, Index idx, const Poly& f) {
    if (idx.size() != r_) throw std::invalid_argument("KForm::add: wrong degree");
    if (f.is_zero()) return;
    int sign = 1;
    for (std::size_t a = 0; a < idx.size(); ++a) {
      for (std::size_t b = 0; b + 1 < idx.size() - a; ++b) {
        if (idx[b] == idx[b + 1]) return;
        if (idx[b] > idx[b + 1]) {
          std::swap(idx[b], idx[b + 1]);
          sign = -sign;
        }
      }
    }
    for (std::size_t b = 0; b + 1 < idx.size(); ++b) {
      if (idx[b] == idx[b + 1]) return;
    }
    auto [it, fresh] = comps_[j].try_emplace(idx, n_);
    if (sign > 0) {
      it->second += f;
    } else {
      it->second -= f;
    }
    if (it->second.is_zero()) comps_[j].erase(it);
  }

  // Single component as a scalar (k = 1) form.
  KForm slot(std::size_t j) const {
    KForm w(n_, r_, 1);
    w.comps_[0] = comps_[j];
    return w;
  }

  // Coefficient of dx_i in component j of a 1-form.
  Poly at(std::size_t j, std::size_t i) const { return coeff(j, Index{i}); }

  KForm& operator+=(const KForm& o) {
    check_same(o);
    for (std::size_t j = 0; j < k(); ++j) {
      for (const auto& [idx, f] : o.comps_[j]) add(j, idx, f);
    }
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    check_same(o);
    for (std::size_t j = 0; j < k(); ++j) {
      for (const auto& [idx, f] : o.comps_[j]) add(j, idx, -f);
    }
    return *this;
  }
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  KForm operator-() const { return KForm(n_, r_, k()) - *this; }

  friend KForm operator*(const Poly& f, const KForm& w) {
    KForm out(w.n_, w.r_, w.k());
    for (std::size_t j = 0; j < w.k(); ++j) {
      for (const auto& [idx, g] : w.comps_[j]) out.add(j, idx, f * g);
    }
    return out;
  }
  friend KForm operator*(const Q& s, const KForm& w) { return Poly::constant(w.n_, s) * w; }

  friend bool operator==(const KForm&, const KForm&) = default;

  // Compose every coefficient with a substitution (no Jacobian factor).
  KForm compose_coefficients(std::span<const Poly> subs, std::size_t new_n) const {
    KForm out(new_n, r_, k());
    for (std::size_t j = 0; j < k(); ++j) {
      for (const auto& [idx, f] : comps_[j]) out.comps_[j].emplace(idx, f.compose(subs));
    }
    return out;
  }

  std::vector<Q> one_form_at(std::size_t j, std::span<const Q> point) const {
    std::vector<Q> v(n_);
    for (const auto& [idx, f] : comps_[j]) v[idx[0]] = f.evaluate(point);
    return v;
  }

  std::string to_string(std::span<const std::string> names = {}) const {
    std::string s = "(";
    for (std::size_t j = 0; j < k(); ++j) {
      if (j) s += ", ";
      std::string c;
      for (const auto& [idx, f] : comps_[j]) {
        if (!c.empty()) c += " + ";
        c += "(" + f.to_string(names) + ")";
        for (std::size_t a = 0; a < idx.size(); ++a) {
          c += a ? "^d" : "*d";
          c += idx[a] < names.size() ? names[idx[a]] : "x" + std::to_string(idx[a]);
        }
      }
      s += c.empty() ? "0" : c;
    }
    return s + ")";
  }

 private:
  void check_same(const KForm& o) const {
    if (o.n_ != n_ || o.r_ != r_ || o.k() != k()) throw std::invalid_argument("KForm: shape mismatch");
  }

  std::size_t n_ = 0;
  std::size_t r_ = 0;
  std::vector<Table> comps_;
};

using CoSection = KForm;

inline KForm ext_d(const KForm& w) {
  KForm out(w.n(), w.r() + 1, w.k());
  if (w.r() + 1 > w.n()) return out;
  for (std::size_t j = 0; j < w.k(); ++j) {
    for (const auto& [idx, f] : w.component(j)) {
      for (std::size_t i = 0; i < w.n(); ++i) {
        Poly df = f.derivative(i);
        if (df.is_zero()) continue;
        KForm::Index e;
        e.reserve(idx.size() + 1);
        e.push_back(i);
        e.insert(e.end(), idx.begin(), idx.end());
        out.add(j, std::move(e), df);
      }
    }
  }
  return out;
}

// Contraction into the first slot.
inline KForm interior(const VectorField& X, const KForm& w) {
  if (w.r() == 0) throw std::invalid_argument("interior: degree-0 form");
  if (X.n() != w.n()) throw std::invalid_argument("interior: dimension mismatch");
  KForm out(w.n(), w.r() - 1, w.k());
  for (std::size_t j = 0; j < w.k(); ++j) {
    for (const auto& [idx, f] : w.component(j)) {
      for (std::size_t p = 0; p < idx.size(); ++p) {
        const Poly& xi = X[idx[p]];
        if (xi.is_zero()) continue;
        KForm::Index rest;
        for (std::size_t a = 0; a < idx.size(); ++a) {
          if (a != p) rest.push_back(idx[a]);
        }
        Poly t = xi * f;
        if (p % 2) t = -t;
        out.add(j, std::move(rest), t);
      }
    }
  }
  return out;
}

inline KForm lie_derivative(const VectorField& X, const KForm& w) {
  if (w.r() == 0) {
    std::vector<Poly> fs;
    for (std::size_t j = 0; j < w.k(); ++j) fs.push_back(X.apply(w.coeff(j, {})));
    KForm out(w.n(), 0, w.k());
    for (std::size_t j = 0; j < w.k(); ++j) out.add(j, {}, fs[j]);
    return out;
  }
  return ext_d(interior(X, w)) + interior(X, ext_d(w));
}

// Wedge of two scalar-valued forms (k = 1 each).
inline KForm wedge(const KForm& a, const KForm& b) {
  if (a.k() != 1 || b.k() != 1 || a.n() != b.n()) throw std::invalid_argument("wedge: scalar forms only");
  KForm out(a.n(), a.r() + b.r(), 1);
  if (a.r() + b.r() > a.n()) return out;
  for (const auto& [ia, fa] : a.component(0)) {
    for (const auto& [ib, fb] : b.component(0)) {
      KForm::Index e = ia;
      e.insert(e.end(), ib.begin(), ib.end());
      out.add(0, std::move(e), fa * fb);
    }
  }
  return out;
}

// The value of a 2-form component on two vectors at a point.
inline Q evaluate_two_form(const KForm& w, std::size_t j, std::span<const Q> point, std::span<const Q> u,
                           std::span<const Q> v) {
  Q acc = 0;
  for (const auto& [idx, f] : w.component(j)) {
    Q c = f.evaluate(point);
    acc += c * (u[idx[0]] * v[idx[1]] - u[idx[1]] * v[idx[0]]);
  }
  return acc;
}

}  // namespace ppkit
