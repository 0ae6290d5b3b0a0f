#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/cartan/forms.hpp"

namespace ppkit {

class PolyMap {
 public:
  PolyMap() = default;
  PolyMap(std::size_t a, std::vector<Poly> comps) : a_(a), c_(std::move(comps)) {
    for (const auto& p : c_) {
      if (p.nvars() != a_) throw std::invalid_argument("PolyMap: component arity mismatch");
    }
  }

  static PolyMap identity(std::size_t n) {
    std::vector<Poly> c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(Poly::variable(n, i));
    return PolyMap(n, std::move(c));
  }

  // x ↦ (x_{idx[0]}, x_{idx[1]}, ...).
  static PolyMap coordinates(std::size_t a, const std::vector<std::size_t>& idx) {
    std::vector<Poly> c;
    for (auto i : idx) c.push_back(Poly::variable(a, i));
    return PolyMap(a, std::move(c));
  }

  std::size_t domain_dim() const { return a_; }
  std::size_t codomain_dim() const { return c_.size(); }
  const std::vector<Poly>& components() const { return c_; }
  const Poly& operator[](std::size_t i) const { return c_[i]; }

  // this ∘ g
  PolyMap after(const PolyMap& g) const {
    if (g.codomain_dim() != a_) throw std::invalid_argument("PolyMap::after: dimension mismatch");
    std::vector<Poly> c;
    c.reserve(c_.size());
    for (const auto& p : c_) c.push_back(p.compose(g.c_));
    return PolyMap(g.a_, std::move(c));
  }

  Poly compose_into(const Poly& f) const { return f.compose(c_); }

  std::vector<std::vector<Poly>> jacobian() const {
    std::vector<std::vector<Poly>> J(c_.size());
    for (std::size_t i = 0; i < c_.size(); ++i) {
      for (std::size_t j = 0; j < a_; ++j) J[i].push_back(c_[i].derivative(j));
    }
    return J;
  }

  std::vector<Q> evaluate(std::span<const Q> x) const {
    std::vector<Q> v;
    for (const auto& p : c_) v.push_back(p.evaluate(x));
    return v;
  }

  friend bool operator==(const PolyMap&, const PolyMap&) = default;

 private:
  std::size_t a_ = 0;
  std::vector<Poly> c_;
};

inline KForm pullback(const PolyMap& f, const KForm& w) {
  if (f.codomain_dim() != w.n()) throw std::invalid_argument("pullback: dimension mismatch");
  std::size_t a = f.domain_dim();
  KForm out(a, w.r(), w.k());
  if (w.r() > a) return out;
  std::vector<KForm> dfs;
  for (std::size_t i = 0; i < f.codomain_dim(); ++i) dfs.push_back(ext_d(KForm::functions({f[i]})));
  std::map<KForm::Index, KForm> cache;
  auto wedge_of = [&](const KForm::Index& idx) -> const KForm& {
    auto it = cache.find(idx);
    if (it != cache.end()) return it->second;
    KForm acc = KForm::functions({Poly::constant(a, 1)});
    for (auto i : idx) acc = wedge(acc, dfs[i]);
    return cache.emplace(idx, std::move(acc)).first->second;
  };
  for (std::size_t j = 0; j < w.k(); ++j) {
    for (const auto& [idx, g] : w.component(j)) {
      Poly gf = g.compose(f.components());
      const KForm& basis = wedge_of(idx);
      for (const auto& [e, c] : basis.component(0)) out.add(j, e, gf * c);
    }
  }
  return out;
}

// Df·X, as a field along f (components are functions on the domain of f).
inline std::vector<Poly> push_forward(const PolyMap& f, const VectorField& X) {
  if (X.n() != f.domain_dim()) throw std::invalid_argument("push_forward: dimension mismatch");
  auto J = f.jacobian();
  std::vector<Poly> out(f.codomain_dim(), Poly(f.domain_dim()));
  for (std::size_t i = 0; i < f.codomain_dim(); ++i) {
    for (std::size_t j = 0; j < X.n(); ++j) {
      if (!J[i][j].is_zero() && !X[j].is_zero()) out[i] += J[i][j] * X[j];
    }
  }
  return out;
}

// Componentwise composition of a vector field's coefficients with f (a field along f).
inline std::vector<Poly> compose_field(const VectorField& Y, const PolyMap& f) {
  std::vector<Poly> out;
  for (const auto& c : Y.coeffs()) out.push_back(c.compose(f.components()));
  return out;
}

}  // namespace ppkit
