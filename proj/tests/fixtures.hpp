#pragma once

#include <stdexcept>
#include <tuple>
#include <vector>

#include "ppkit/polypoisson/structure.hpp"

namespace ppkit::fixtures {


inline const SamplePlan kPlan{5, 6, 3, {}};

inline Poly C(std::size_t n, long c) { return Poly::constant(n, c); }
inline Poly V(std::size_t n, std::size_t i) { return Poly::variable(n, i); }

inline CoSection one_form(std::size_t n, std::size_t k, std::vector<std::tuple<std::size_t, std::size_t, Poly>> terms) {
  CoSection s(n, 1, k);
  for (auto& [j, i, f] : terms) s.add(j, {i}, f);
  return s;
}

// ℝ³(x, y, t), ω ≡ (dx∧dy, 2dx∧dy) on the first two coordinates only.
inline PolyPoissonStruct flat_pair_on_three_space() {
  PolyPoissonStruct pp;
  pp.n = 3;
  pp.k = 2;
  pp.plan = kPlan;
  pp.names = {"x", "y", "t"};
  pp.frame = {one_form(3, 2, {{0, 1, C(3, 1)}, {1, 1, C(3, 2)}}), one_form(3, 2, {{0, 0, C(3, -1)}, {1, 0, C(3, -2)}})};
  pp.anchor = {VectorField::coordinate(3, 0), VectorField::coordinate(3, 1)};
  return pp;
}

inline PolyPoissonStruct single_covector_plane() {
  PolyPoissonStruct pp;
  pp.n = 2;
  pp.k = 1;
  pp.plan = kPlan;
  pp.frame = {one_form(2, 1, {{0, 0, C(2, 1)}})};
  pp.anchor = {VectorField(2)};
  return pp;
}

inline std::vector<std::vector<Poly>> symplectic_plane_bivector() { return {{C(2, 0), C(2, 1)}, {C(2, -1), C(2, 0)}}; }

inline std::vector<std::vector<Poly>> zero_bivector(std::size_t n) { return std::vector<std::vector<Poly>>(n, std::vector<Poly>(n, Poly(n))); }

// y ∂x∧∂y + ∂y∧∂z: antisymmetric, {z, {x, y}} = −1.
inline std::vector<std::vector<Poly>> non_poisson_bivector() {
  auto pi = zero_bivector(3);
  pi[0][1] = V(3, 1);
  pi[1][0] = -V(3, 1);
  pi[1][2] = C(3, 1);
  pi[2][1] = C(3, -1);
  return pi;
}

// Linear Poisson bivector of a Lie algebra: π_il = Σ_m c_il^m z_m.
inline std::vector<std::vector<Poly>> linear_bivector(const LieAlgebra& g) {
  std::size_t d = g.dim;
  auto pi = zero_bivector(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t m = 0; m < d; ++m)
        if (g.c[i][l][m] != 0) pi[i][l] += g.c[i][l][m] * V(d, m);
  return pi;
}

inline std::vector<PolyPoissonStruct> passing_fixtures() {
  KForm w(2, 2, 1);
  w.add(0, {0, 1}, C(2, 1) + V(2, 0) * V(2, 0));
  return {
      from_polysymplectic(covelocities(2, 2), kPlan),
      from_polysymplectic(covelocities(1, 3), kPlan),
      from_polysymplectic(w, kPlan),
      product_of_poisson({symplectic_plane_bivector(), symplectic_plane_bivector()}, kPlan),
      product_of_poisson({linear_bivector(heisenberg()), zero_bivector(1)}, kPlan),
      lie_poisson_direct_sum(heisenberg(), 2, kPlan),
      lie_poisson_direct_sum(so3(), 2, kPlan),
      lie_poisson_direct_sum(abelian(2), 3, kPlan),
      trivial_structure(2, 2, kPlan),
  };
}


inline std::vector<std::vector<RatFun>> bivector_of(const PolyPoissonStruct& pp) {
  std::size_t n = pp.n;
  Mat fm = frame_matrix(pp.frame, n, 1);
  std::vector<std::vector<RatFun>> pi(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<RatFun> e(n, RatFun(n));
    e[i] = RatFun::constant(n, 1);
    auto c = solve_membership(fm, e);
    if (!c) throw std::logic_error("bivector_of: frame does not span the cotangent space");
    pi[i] = std::vector<RatFun>(n, RatFun(n));
    for (std::size_t a = 0; a < pp.rank(); ++a)
      for (std::size_t l = 0; l < n; ++l) pi[i][l] += (*c)[a] * RatFun(pp.anchor[a][l]);
  }
  return pi;
}

inline RatFun poisson(const std::vector<std::vector<RatFun>>& pi, const RatFun& f, const RatFun& g) {
  std::size_t n = pi.size();
  RatFun s(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < n; ++l)
      if (!pi[i][l].is_zero()) s += pi[i][l] * f.derivative(i) * g.derivative(l);
  return s;
}

inline bool bivector_jacobi(const std::vector<std::vector<RatFun>>& pi) {
  std::size_t n = pi.size();
  auto x = [&](std::size_t i) { return RatFun(Poly::variable(n, i)); };
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c) {
        RatFun s = poisson(pi, x(a), poisson(pi, x(b), x(c))) + poisson(pi, x(b), poisson(pi, x(c), x(a))) +
                   poisson(pi, x(c), poisson(pi, x(a), x(b)));
        if (!s.is_zero()) return false;
      }
  return true;
}

inline std::vector<Poly> monomials_up_to_two(std::size_t n) {
  std::vector<Poly> out{C(n, 1)};
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(V(n, i));
    for (std::size_t l = i; l < n; ++l) out.push_back(V(n, i) * V(n, l));
  }
  return out;
}

inline std::vector<PolyPoissonStruct> k1_fixtures() {
  std::vector<std::vector<Poly>> xy{{C(2, 0), V(2, 0) * V(2, 1)}, {-(V(2, 0) * V(2, 1)), C(2, 0)}};
  return {
      from_polysymplectic(covelocities(1, 1), kPlan),
      from_polysymplectic(covelocities(2, 1), kPlan),
      bivector_structure(xy, kPlan),
      lie_poisson_direct_sum(heisenberg(), 1, kPlan),
      lie_poisson_direct_sum(so3(), 1, kPlan),
  };
}


// ℝ³(x, y, t) with ω_t = s(t)·(dx∧dy, 2dx∧dy); S₁ adds (dt, 0) and (0, dt), S₂ adds (dt, dt), S₃ adds (dt, 0),
// S₀ adds nothing. All added elements have anchor 0.
inline PolyPoissonStruct time_family(int which, const Poly& s = Poly::constant(3, 1)) {
  PolyPoissonStruct pp = flat_pair_on_three_space();
  pp.frame[0] = s * pp.frame[0];
  pp.frame[1] = s * pp.frame[1];
  auto add = [&](CoSection c) {
    pp.frame.push_back(std::move(c));
    pp.anchor.emplace_back(3);
  };
  if (which == 1) {
    add(one_form(3, 2, {{0, 2, C(3, 1)}}));
    add(one_form(3, 2, {{1, 2, C(3, 1)}}));
  } else if (which == 2) {
    add(one_form(3, 2, {{0, 2, C(3, 1)}, {1, 2, C(3, 1)}}));
  } else if (which == 3) {
    add(one_form(3, 2, {{0, 2, C(3, 1)}}));
  }
  return pp;
}

inline KForm time_family_form(const Poly& s = Poly::constant(3, 1)) {
  KForm w(3, 2, 2);
  w.add(0, {0, 1}, s);
  w.add(1, {0, 1}, 2 * s);
  return w;
}

}  // namespace ppkit::fixtures
