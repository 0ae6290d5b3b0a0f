#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ppkit/reduction/reduction.hpp"

namespace ppkit {

inline QuotientModel drop_coordinates(std::size_t n, const std::vector<std::size_t>& drop) {
  auto dropped = [&](std::size_t l) { return std::find(drop.begin(), drop.end(), l) != drop.end(); };
  std::size_t r = n - drop.size();
  std::vector<Poly> pi, sigma;
  for (std::size_t l = 0, c = 0; l < n; ++l) {
    if (!dropped(l)) pi.push_back(Poly::variable(n, l));
    sigma.push_back(dropped(l) ? Poly(r) : Poly::variable(r, c++));
  }
  return {PolyMap(n, pi), PolyMap(r, sigma)};
}

inline QuotientModel drop_coordinate(std::size_t n, std::size_t i) { return drop_coordinates(n, {i}); }

inline QuotientModel identity_quotient(std::size_t n) { return {PolyMap::identity(n), PolyMap::identity(n)}; }

// Translation of q_i on Q = ℝ^nq, lifted to ⊕_k T*Q.
inline ActionData lifted_translation(std::size_t nq, std::size_t k, std::size_t i) {
  std::size_t n = nq * (1 + k);
  ActionData a;
  a.m = 1;
  a.generators = {VectorField::coordinate(n, i)};
  std::vector<Poly> f;
  for (std::size_t l = 0; l < n; ++l) f.push_back(Poly::variable(n + 1, l) + (l == i ? Poly::variable(n + 1, n) : Poly(n + 1)));
  a.family = PolyMap(n + 1, f);
  a.algebra = abelian(1);
  return a;
}

// ⟨J_j, e⟩ = p^(j)_i.
inline MomentData translation_moment(std::size_t nq, std::size_t k, std::size_t i) {
  std::size_t n = nq * (1 + k);
  std::vector<Poly> J;
  for (std::size_t j = 0; j < k; ++j) J.push_back(Poly::variable(n, nq * (1 + j) + i));
  return {k, 1, PolyMap(n, J)};
}

// J^{-1}(0) = {p^(j)_i = 0}, parametrized by the remaining coordinates; residual quotient drops q_i.
inline LevelSetModel translation_zero_level(std::size_t nq, std::size_t k, std::size_t i) {
  std::size_t n = nq * (1 + k), d = n - k;
  std::vector<Poly> psi;
  for (std::size_t l = 0, c = 0; l < n; ++l) {
    bool fixed = l >= nq && (l - nq) % nq == i;
    psi.push_back(fixed ? Poly(d) : Poly::variable(d, c++));
  }
  return {Point(k), PolyMap(d, psi), drop_coordinate(d, i)};
}

// ⊕_k T*G for a nilpotent group in exponential coordinates, with left multiplication lifted to covectors.
struct CotangentGroup {
  LieAlgebra g;
  std::size_t k = 0;
  KForm omega;
  ActionData action;
  MomentData moment;     // right trivialization
  QuotientModel quotient;  // minus the left trivialization, onto (g*)^k
  std::vector<std::vector<Poly>> right_mc;  // R[l][i]: right Maurer-Cartan form on the group coordinates
};

inline CotangentGroup cotangent_left_multiplication(const LieAlgebra& g, std::size_t k) {
  using namespace detail;
  std::size_t cls = g.nilpotency_class();
  if (cls == 0 || cls > 4) throw std::invalid_argument("cotangent_left_multiplication: need nilpotency class between 1 and 4");
  std::size_t d = g.dim, n = d * (1 + k);
  CotangentGroup C;
  C.g = g;
  C.k = k;
  C.omega = covelocities(d, k);
  std::size_t nv = 2 * d;
  PVec B = bch(g, vars(nv, 0, d), vars(nv, d, d), nv);
  PVec X = vars(n, 0, d);
  auto subs = [&](const PVec& a, const PVec& b) { return concat(a, b); };
  PVec zero(d, Poly(n)), negX;
  for (const auto& x : X) negX.push_back(-x);
  // uR[a][l] = ∂B_l/∂Y_a (0, X), uL[b][l] = ∂B_l/∂X_b (X, 0), R[l][i] = ∂B_l/∂Y_i (X, −X)
  std::vector<PVec> uR(d, PVec(d, Poly(n))), uL(d, PVec(d, Poly(n)));
  C.right_mc.assign(d, PVec(d, Poly(n)));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t l = 0; l < d; ++l) {
      uR[a][l] = B[l].derivative(a).compose(subs(zero, X));
      uL[a][l] = B[l].derivative(d + a).compose(subs(X, zero));
      C.right_mc[l][a] = B[l].derivative(a).compose(subs(X, negX));
    }
  auto p = [&](std::size_t j, std::size_t i) { return Poly::variable(n, d + j * d + i); };
  C.action.m = d;
  C.action.algebra = g;
  for (std::size_t a = 0; a < d; ++a) {
    VectorField u(n);
    for (std::size_t l = 0; l < d; ++l) u[l] = uR[a][l];
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < d; ++l) {
        Poly s(n);
        for (std::size_t i = 0; i < d; ++i) s -= p(j, i) * uR[a][i].derivative(l);
        u[d + j * d + l] = s;
      }
    C.action.generators.push_back(u);
  }
  {
    // φ_Y(X, p) = (BCH(Y, X), p · D_2 BCH(−Y, ·) at BCH(Y, X))
    std::size_t nf = n + d;
    PVec Xf = vars(nf, 0, d), Yf = vars(nf, n, d), negY;
    for (const auto& y : Yf) negY.push_back(-y);
    PVec Xn = bch(g, Yf, Xf, nf);
    std::vector<Poly> comps = Xn;
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t l = 0; l < d; ++l) {
        Poly s(nf);
        for (std::size_t i = 0; i < d; ++i) s += Poly::variable(nf, d + j * d + i) * B[i].derivative(d + l).compose(subs(negY, Xn));
        comps.push_back(s);
      }
    C.action.family = PolyMap(nf, comps);
  }
  std::vector<Poly> J, pi;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t a = 0; a < d; ++a) {
      Poly sr(n), sl(n);
      for (std::size_t l = 0; l < d; ++l) {
        sr += p(j, l) * uR[a][l];
        sl -= p(j, l) * uL[a][l];
      }
      J.push_back(sr);
      pi.push_back(sl);
    }
  C.moment = {k, d, PolyMap(n, J)};
  std::size_t nr = k * d;
  PVec back;
  for (const auto& z : vars(nr, 0, nr)) back.push_back(-z);
  C.quotient = {PolyMap(n, pi), PolyMap(nr, concat(PVec(d, Poly(nr)), back))};
  return C;
}

// J^{-1}(ζ) ≅ G through X ↦ (X, ζ ∘ right Maurer-Cartan form).
inline LevelSetModel cotangent_level(const CotangentGroup& C, const Point& zeta, QuotientModel residual) {
  std::size_t d = C.g.dim, n = d * (1 + C.k);
  std::vector<std::size_t> onto = detail::range_map(0, d);
  std::vector<Poly> subs;
  for (std::size_t i = 0; i < n; ++i) subs.push_back(i < d ? Poly::variable(d, i) : Poly(d));
  std::vector<Poly> psi = detail::vars(d, 0, d);
  for (std::size_t j = 0; j < C.k; ++j)
    for (std::size_t i = 0; i < d; ++i) {
      Poly s(d);
      for (std::size_t l = 0; l < d; ++l)
        if (zeta[j * d + l] != 0) s += zeta[j * d + l] * C.right_mc[l][i].compose(subs);
      psi.push_back(s);
    }
  return {zeta, PolyMap(d, psi), std::move(residual)};
}

// Product of symplectic factors T*ℝ², each reduced by translation of its first coordinate at level (zeta1, zeta2).
struct ProductTranslation {
  KForm omega;
  ActionData action;
  MomentData moment;
  LevelSetModel level;
};

inline ProductTranslation product_translation(const Q& zeta1, const Q& zeta2) {
  std::size_t n = 8;
  std::vector<Poly> first, second;
  for (std::size_t i = 0; i < 4; ++i) {
    first.push_back(Poly::variable(n, i));
    second.push_back(Poly::variable(n, 4 + i));
  }
  ProductTranslation P;
  P.omega = product_polysymplectic({{covelocities(2, 1), PolyMap(n, first)}, {covelocities(2, 1), PolyMap(n, second)}});
  P.action.m = 2;
  P.action.generators = {VectorField::coordinate(n, 0), VectorField::coordinate(n, 4)};
  std::vector<Poly> f;
  for (std::size_t l = 0; l < n; ++l) {
    Poly c = Poly::variable(n + 2, l);
    if (l == 0) c += Poly::variable(n + 2, n);
    if (l == 4) c += Poly::variable(n + 2, n + 1);
    f.push_back(c);
  }
  P.action.family = PolyMap(n + 2, f);
  P.action.algebra = abelian(2);
  // slot j pairs only with the j-th factor's generator
  P.moment = {2, 2, PolyMap(n, {Poly::variable(n, 2), Poly(n), Poly(n), Poly::variable(n, 6)})};
  std::size_t d = 6;
  std::vector<Poly> psi = {Poly::variable(d, 0), Poly::variable(d, 1), Poly::constant(d, zeta1), Poly::variable(d, 2),
                           Poly::variable(d, 3), Poly::variable(d, 4), Poly::constant(d, zeta2), Poly::variable(d, 5)};
  P.level = {Point{zeta1, Q(0), Q(0), zeta2}, PolyMap(d, psi), drop_coordinates(d, {0, 3})};
  return P;
}

// Constant-coefficient form on the (x, y) plane reduced by x-translations through the pair groupoid.
inline GroupoidReductionInput pair_plane_translation(const KForm& w, const SamplePlan& plan) {
  if (w.n() != 2) throw std::invalid_argument("pair_plane_translation: base must be the plane");
  std::size_t k = w.k();
  for (std::size_t j = 0; j < k; ++j)
    for (const auto& [idx, f] : w.component(j))
      if (!f.is_constant()) throw std::invalid_argument("pair_plane_translation: coefficients must be constant");
  GroupoidReductionInput in;
  in.model = build_pair(w, plan);
  std::size_t N = 4;
  // arrows (x1, y1, x2, y2), t = (x1, y1), s = (x2, y2)
  in.action.m = 1;
  in.action.generators = {VectorField::coordinate(N, 0) + VectorField::coordinate(N, 2)};
  in.action.algebra = abelian(1);
  std::vector<Poly> J;
  for (std::size_t j = 0; j < k; ++j) {
    Q c = w.coeff(j, {0, 1}).is_zero() ? Q(0) : w.coeff(j, {0, 1}).leading_coefficient();
    J.push_back(c * (Poly::variable(N, 1) - Poly::variable(N, 3)));
  }
  in.moment = {k, 1, PolyMap(N, J)};
  // J^{-1}(0) = {y1 = y2}, parameters (x1, x2, y); residual invariants (x1 − x2, y)
  std::size_t d = 3;
  in.level.zeta = Point(k);
  in.level.psi = PolyMap(d, {Poly::variable(d, 0), Poly::variable(d, 2), Poly::variable(d, 1), Poly::variable(d, 2)});
  in.level.residual = {PolyMap(d, {Poly::variable(d, 0) - Poly::variable(d, 1), Poly::variable(d, 2)}),
                       PolyMap(2, {Poly::variable(2, 0), Poly(2), Poly::variable(2, 1)})};
  // bundle of groups (u, y) ⇉ y under addition in u
  GroupoidChart& R = in.reduced;
  R.N = 2;
  R.n = 1;
  R.P = 3;
  R.s = R.t = PolyMap(2, {Poly::variable(2, 1)});
  R.eps = PolyMap(1, {Poly(1), Poly::variable(1, 0)});
  R.inv = PolyMap(2, {-Poly::variable(2, 0), Poly::variable(2, 1)});
  R.pr1 = PolyMap(3, {Poly::variable(3, 0), Poly::variable(3, 2)});
  R.pr2 = PolyMap(3, {Poly::variable(3, 1), Poly::variable(3, 2)});
  R.m = PolyMap(3, {Poly::variable(3, 0) + Poly::variable(3, 1), Poly::variable(3, 2)});
  R.left_unit = PolyMap(2, {Poly(2), Poly::variable(2, 0), Poly::variable(2, 1)});
  R.right_unit = PolyMap(2, {Poly::variable(2, 0), Poly(2), Poly::variable(2, 1)});
  R.inverse_pair = PolyMap(2, {Poly::variable(2, 0), -Poly::variable(2, 0), Poly::variable(2, 1)});
  R.names = {"u", "y"};
  in.base_action.m = 1;
  in.base_action.generators = {VectorField::coordinate(2, 0)};
  in.base_action.algebra = abelian(1);
  in.base_quotient = drop_coordinate(2, 0);
  return in;
}

// ⊕_k T*ℝ^nq ⇉ ℝ^nq reduced by translation of q_i.
inline GroupoidReductionInput covelocity_translation(std::size_t nq, std::size_t k, std::size_t i, const SamplePlan& plan) {
  if (nq < 2) throw std::invalid_argument("covelocity_translation: need at least two base coordinates");
  GroupoidReductionInput in;
  in.model = build_covelocity(nq, k, plan);
  in.action = lifted_translation(nq, k, i);
  in.moment = translation_moment(nq, k, i);
  in.level = translation_zero_level(nq, k, i);
  in.reduced = build_covelocity(nq - 1, k, plan).chart;
  in.base_action.m = 1;
  in.base_action.generators = {VectorField::coordinate(nq, i)};
  in.base_action.algebra = abelian(1);
  in.base_quotient = drop_coordinate(nq, i);
  return in;
}

// Trivial group: every quotient is the identity.
inline GroupoidReductionInput trivial_group(const GroupoidModel& M) {
  GroupoidReductionInput in;
  in.model = M;
  in.moment = {M.omega.k(), 0, PolyMap(M.chart.N, {})};
  in.level = {Point{}, PolyMap::identity(M.chart.N), identity_quotient(M.chart.N)};
  in.reduced = M.chart;
  in.base_quotient = identity_quotient(M.chart.n);
  return in;
}

}  // namespace ppkit
