#pragma once

// Sparse multivariate polynomials over the rationals.
//
// Terms are kept in a std::map keyed by exponent vectors, so iteration order
// is lexicographic with x_0 > x_1 > ... and the leading term is the last
// entry.  That order is a monomial order, which is all exact division and
// the pseudo-remainder gcd below rely on.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ppkit {

using Q = mpq_class;

inline std::string to_string(const Q& q) { return q.get_str(); }

class Poly {
 public:
  using Exponent = std::vector<unsigned>;
  using Terms = std::map<Exponent, Q>;

  Poly() = default;
  explicit Poly(std::size_t nvars) : nvars_(nvars) {}

  static Poly constant(std::size_t nvars, const Q& c) {
    Poly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
  }

  static Poly variable(std::size_t nvars, std::size_t i) {
    if (i >= nvars) throw std::out_of_range("Poly::variable: index out of range");
    Exponent e(nvars, 0);
    e[i] = 1;
    Poly p(nvars);
    p.terms_.emplace(std::move(e), Q(1));
    return p;
  }

  static Poly monomial(Exponent e, const Q& c) {
    Poly p(e.size());
    p.add_term(e, c);
    return p;
  }

  std::size_t nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](unsigned v) { return v == 0; });
  }

  Q constant_term() const {
    auto it = terms_.find(Exponent(nvars_, 0));
    return it == terms_.end() ? Q(0) : it->second;
  }

  unsigned degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) {
      unsigned s = 0;
      for (unsigned v : e) s += v;
      d = std::max(d, s);
    }
    return d;
  }

  unsigned degree_in(std::size_t var) const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
    return d;
  }

  const std::pair<const Exponent, Q>& leading() const {
    if (terms_.empty()) throw std::logic_error("Poly::leading on zero polynomial");
    return *terms_.rbegin();
  }

  Q leading_coefficient() const { return leading().second; }

  Poly monic() const {
    if (is_zero()) return *this;
    Q lc = leading_coefficient();
    return *this * Q(1 / lc);
  }

  Poly& operator+=(const Poly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Poly& operator-=(const Poly& o) {
    check_same(o);
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Poly& operator*=(const Q& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  Poly& operator*=(const Poly& o) {
    *this = *this * o;
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const Q& s) { return a *= s; }
  friend Poly operator*(const Q& s, Poly a) { return a *= s; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_same(b);
    Poly out(a.nvars_);
    if (a.is_zero() || b.is_zero()) return out;
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    }
    return out;
  }

  Poly operator-() const {
    Poly out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Poly pow(unsigned k) const {
    Poly result = constant(nvars_, 1);
    Poly base = *this;
    while (k) {
      if (k & 1u) result *= base;
      k >>= 1u;
      if (k) base = base * base;
    }
    return result;
  }

  Poly derivative(std::size_t var) const {
    Poly out(nvars_);
    for (const auto& [e, c] : terms_) {
      if (e[var] == 0) continue;
      Exponent f = e;
      --f[var];
      out.add_term(f, c * e[var]);
    }
    return out;
  }

  Q evaluate(std::span<const Q> point) const {
    if (point.size() != nvars_) throw std::invalid_argument("Poly::evaluate: dimension mismatch");
    Q acc = 0;
    for (const auto& [e, c] : terms_) {
      Q t = c;
      for (std::size_t i = 0; i < nvars_; ++i) {
        for (unsigned k = 0; k < e[i]; ++k) t *= point[i];
      }
      acc += t;
    }
    return acc;
  }

  // Substitutes subs[i] for x_i; every substitute must share one variable count.
  Poly compose(std::span<const Poly> subs) const {
    if (subs.size() != nvars_) throw std::invalid_argument("Poly::compose: arity mismatch");
    std::size_t m = subs.empty() ? 0 : subs.front().nvars();
    for (const auto& s : subs) {
      if (s.nvars() != m) throw std::invalid_argument("Poly::compose: mixed variable counts");
    }
    Poly out(m);
    std::vector<std::vector<Poly>> powers(nvars_);
    for (const auto& [e, c] : terms_) {
      Poly t = constant(m, c);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(constant(m, 1));
        while (cache.size() <= e[i]) cache.push_back(cache.back() * subs[i]);
        t *= cache[e[i]];
      }
      out += t;
    }
    return out;
  }

  // Re-embeds into `nvars` variables, old variable i becoming new variable map[i].
  Poly embed(std::size_t nvars, std::span<const std::size_t> map) const {
    if (map.size() != nvars_) throw std::invalid_argument("Poly::embed: map size mismatch");
    Poly out(nvars);
    for (const auto& [e, c] : terms_) {
      Exponent f(nvars, 0);
      for (std::size_t i = 0; i < nvars_; ++i) f[map[i]] += e[i];
      out.add_term(f, c);
    }
    return out;
  }

  std::optional<Poly> divide_exact(const Poly& d) const {
    check_same(d);
    if (d.is_zero()) throw std::domain_error("Poly::divide_exact: division by zero");
    Poly q(nvars_);
    Poly r = *this;
    const auto& [ed, cd] = d.leading();
    while (!r.is_zero()) {
      const auto& [er, cr] = r.leading();
      Exponent e(nvars_);
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (er[i] < ed[i]) return std::nullopt;
        e[i] = er[i] - ed[i];
      }
      Poly t = monomial(e, cr / cd);
      q += t;
      r -= t * d;
    }
    return q;
  }

  // Coefficients of this polynomial viewed in Q[others][x_var], keyed by degree.
  std::map<unsigned, Poly> coefficients_in(std::size_t var) const {
    std::map<unsigned, Poly> out;
    for (const auto& [e, c] : terms_) {
      Exponent f = e;
      unsigned d = f[var];
      f[var] = 0;
      auto [it, fresh] = out.try_emplace(d, nvars_);
      it->second.add_term(f, c);
    }
    return out;
  }

  std::string to_string(std::span<const std::string> names = {}) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [e, c] = *it;
      bool unit = true;
      for (unsigned v : e) unit = unit && v == 0;
      Q mag = abs(c);
      if (first) {
        if (c < 0) os << "-";
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      first = false;
      bool wrote = false;
      if (mag != 1 || unit) {
        os << mag.get_str();
        wrote = true;
      }
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (wrote) os << "*";
        if (i < names.size()) {
          os << names[i];
        } else {
          os << "x" << i;
        }
        if (e[i] > 1) os << "^" << e[i];
        wrote = true;
      }
    }
    return os.str();
  }

 private:
  void add_term(const Exponent& e, const Q& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(e, c);
    if (fresh) {
      it->second.canonicalize();
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  void check_same(const Poly& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Poly: variable count mismatch");
  }

  std::size_t nvars_ = 0;
  Terms terms_;
};

namespace detail {

inline std::size_t first_shared_variable(const Poly& a, const Poly& b) {
  for (std::size_t v = 0; v < a.nvars(); ++v) {
    if (a.degree_in(v) > 0 || b.degree_in(v) > 0) return v;
  }
  return a.nvars();
}

inline Poly pseudo_remainder(const Poly& a, const Poly& b, std::size_t var) {
  unsigned db = b.degree_in(var);
  Poly lcb = b.coefficients_in(var).rbegin()->second;
  Poly r = a;
  while (!r.is_zero() && r.degree_in(var) >= db) {
    auto coeffs = r.coefficients_in(var);
    unsigned dr = coeffs.rbegin()->first;
    Poly lcr = coeffs.rbegin()->second;
    Poly::Exponent e(a.nvars(), 0);
    e[var] = dr - db;
    r = lcb * r - lcr * Poly::monomial(e, 1) * b;
  }
  return r;
}

}  // namespace detail

Poly gcd(const Poly& a, const Poly& b);

namespace detail {

inline Poly content_in(const Poly& p, std::size_t var) {
  Poly g(p.nvars());
  for (const auto& [d, c] : p.coefficients_in(var)) {
    g = gcd(g, c);
    if (g.is_constant() && !g.is_zero()) break;
  }
  return g;
}

inline Poly primitive_part_in(const Poly& p, std::size_t var) {
  if (p.is_zero()) return p;
  if (p.degree_in(var) == 0) return Poly::constant(p.nvars(), 1);
  return *p.divide_exact(content_in(p, var));
}

}  // namespace detail

// Monic gcd over Q; gcd(0, 0) = 0.  Recursive primitive remainder sequence.
inline Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly::constant(a.nvars(), 1);
  std::size_t v = detail::first_shared_variable(a, b);
  if (a.degree_in(v) == 0) return gcd(a, detail::content_in(b, v));
  if (b.degree_in(v) == 0) return gcd(detail::content_in(a, v), b);
  Poly ca = detail::content_in(a, v);
  Poly cb = detail::content_in(b, v);
  Poly g = gcd(ca, cb);
  Poly pa = *a.divide_exact(ca);
  Poly pb = *b.divide_exact(cb);
  if (pa.degree_in(v) < pb.degree_in(v)) std::swap(pa, pb);
  while (!pb.is_zero()) {
    Poly r = detail::pseudo_remainder(pa, pb, v);
    pa = std::move(pb);
    pb = detail::primitive_part_in(r, v);
  }
  return (g * detail::primitive_part_in(pa, v)).monic();
}

inline Poly lcm(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly(a.nvars());
  return (*(a * b).divide_exact(gcd(a, b))).monic();
}

}  // namespace ppkit
