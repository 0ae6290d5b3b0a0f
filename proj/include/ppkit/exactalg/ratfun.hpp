#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "ppkit/exactalg/poly.hpp"

namespace ppkit {

// num/den with gcd removed and den monic, so equal functions compare equal.
class RatFun {
 public:
  RatFun() = default;
  explicit RatFun(std::size_t nvars) : num_(nvars), den_(Poly::constant(nvars, 1)) {}
  RatFun(Poly p)  // NOLINT(google-explicit-constructor)
      : num_(std::move(p)), den_(Poly::constant(num_.nvars(), 1)) {}

  RatFun(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw std::domain_error("RatFun: zero denominator");
    normalize();
  }

  static RatFun constant(std::size_t nvars, const Q& c) { return RatFun(Poly::constant(nvars, c)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  std::size_t nvars() const { return num_.nvars(); }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }

  friend RatFun operator+(const RatFun& a, const RatFun& b) {
    if (a.den_ == b.den_) return RatFun(a.num_ + b.num_, a.den_);
    return RatFun(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }
  friend RatFun operator*(const RatFun& a, const RatFun& b) {
    if (a.is_zero() || b.is_zero()) return RatFun(a.nvars());
    return RatFun(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFun operator/(const RatFun& a, const RatFun& b) {
    if (b.is_zero()) throw std::domain_error("RatFun: division by zero");
    return RatFun(a.num_ * b.den_, a.den_ * b.num_);
  }
  RatFun operator-() const {
    RatFun r = *this;
    r.num_ = -r.num_;
    return r;
  }
  RatFun& operator+=(const RatFun& o) { return *this = *this + o; }
  RatFun& operator-=(const RatFun& o) { return *this = *this - o; }
  RatFun& operator*=(const RatFun& o) { return *this = *this * o; }

  friend bool operator==(const RatFun& a, const RatFun& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  RatFun derivative(std::size_t var) const {
    if (is_polynomial()) return RatFun(num_.derivative(var) * Q(1 / den_.leading_coefficient()));
    return RatFun(num_.derivative(var) * den_ - num_ * den_.derivative(var), den_ * den_);
  }

  std::optional<Q> evaluate(std::span<const Q> point) const {
    Q d = den_.evaluate(point);
    if (d == 0) return std::nullopt;
    return num_.evaluate(point) / d;
  }

  RatFun compose(std::span<const Poly> subs) const {
    return RatFun(num_.compose(subs), den_.compose(subs));
  }

  std::string to_string(std::span<const std::string> names = {}) const {
    if (is_polynomial()) return num_.to_string(names);
    return "(" + num_.to_string(names) + ")/(" + den_.to_string(names) + ")";
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly::constant(num_.nvars(), 1);
      return;
    }
    if (!den_.is_constant() && !num_.is_constant()) {
      Poly g = gcd(num_, den_);
      if (!g.is_constant()) {
        num_ = *num_.divide_exact(g);
        den_ = *den_.divide_exact(g);
      }
    }
    Q lc = den_.leading_coefficient();
    if (lc != 1) {
      num_ *= Q(1 / lc);
      den_ *= Q(1 / lc);
    }
  }

  Poly num_;
  Poly den_;
};

}  // namespace ppkit
