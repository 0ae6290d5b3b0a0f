#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ppkit/groupoid/groupoid.hpp"

namespace ppkit {

namespace detail {

inline std::vector<std::size_t> range_map(std::size_t offset, std::size_t len) {
  std::vector<std::size_t> m(len);
  std::iota(m.begin(), m.end(), offset);
  return m;
}

inline std::vector<Poly> concat(std::vector<Poly> a, const std::vector<Poly>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::vector<Poly> vars(std::size_t nvars, std::size_t offset, std::size_t len) {
  std::vector<Poly> v;
  for (std::size_t i = 0; i < len; ++i) v.push_back(Poly::variable(nvars, offset + i));
  return v;
}

inline LieAlgebroidData zero_bracket_algebroid(std::size_t n, std::vector<VectorField> anchor) {
  LieAlgebroidData A;
  A.n = n;
  A.r = anchor.size();
  A.anchor = std::move(anchor);
  A.structure.assign(A.r, std::vector<std::vector<RatFun>>(A.r, std::vector<RatFun>(A.r, RatFun(n))));
  return A;
}

// Lie algebra arithmetic on vectors of polynomials.
using PVec = std::vector<Poly>;

inline PVec lie_br(const LieAlgebra& g, const PVec& u, const PVec& v, std::size_t nv) {
  PVec out(g.dim, Poly(nv));
  for (std::size_t a = 0; a < g.dim; ++a) {
    if (u[a].is_zero()) continue;
    for (std::size_t b = 0; b < g.dim; ++b) {
      if (v[b].is_zero()) continue;
      Poly uv = u[a] * v[b];
      for (std::size_t l = 0; l < g.dim; ++l)
        if (g.c[a][b][l] != 0) out[l] += g.c[a][b][l] * uv;
    }
  }
  return out;
}

inline PVec lin(const PVec& a, const Q& s, const PVec& b) {
  PVec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += s * b[i];
  return out;
}

// Baker-Campbell-Hausdorff through degree four; exact for nilpotency class at most four.
inline PVec bch(const LieAlgebra& g, const PVec& X, const PVec& Y, std::size_t nv) {
  PVec XY = lie_br(g, X, Y, nv);
  PVec XXY = lie_br(g, X, XY, nv);
  PVec YYX = lie_br(g, Y, lie_br(g, Y, X, nv), nv);
  PVec YXXY = lie_br(g, Y, XXY, nv);
  PVec Z = lin(X, 1, Y);
  Z = lin(Z, Q(1, 2), XY);
  Z = lin(Z, Q(1, 12), XXY);
  Z = lin(Z, Q(1, 12), YYX);
  Z = lin(Z, Q(-1, 24), YXXY);
  return Z;
}

// E[l][b] with Ad*_X ζ = Σ_l ζ_l E[l][b], i.e. E = exp(−ad_X).
inline std::vector<PVec> coadjoint_matrix(const LieAlgebra& g, const PVec& X, std::size_t nv) {
  std::size_t d = g.dim;
  std::vector<PVec> adX(d, PVec(d, Poly(nv)));
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t a = 0; a < d; ++a)
        if (g.c[a][b][l] != 0) adX[l][b] += g.c[a][b][l] * X[a];
  std::vector<PVec> E(d, PVec(d, Poly(nv))), term(d, PVec(d, Poly(nv)));
  for (std::size_t i = 0; i < d; ++i) E[i][i] = term[i][i] = Poly::constant(nv, 1);
  for (std::size_t p = 1; p <= d + 1; ++p) {
    std::vector<PVec> next(d, PVec(d, Poly(nv)));
    bool nz = false;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t m = 0; m < d; ++m)
          if (!term[i][m].is_zero() && !adX[m][j].is_zero()) next[i][j] -= term[i][m] * adX[m][j];
        next[i][j] *= Q(1, p);
        nz = nz || !next[i][j].is_zero();
      }
    if (!nz) break;
    term = next;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j) E[i][j] += term[i][j];
  }
  return E;
}

// Ad*_X applied slotwise to ζ ∈ (g*)^k.
inline PVec coadjoint_apply(const LieAlgebra& g, std::size_t k, const PVec& X, const PVec& zeta, std::size_t nv) {
  std::size_t d = g.dim;
  auto E = coadjoint_matrix(g, X, nv);
  PVec out(k * d, Poly(nv));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t l = 0; l < d; ++l)
        if (!E[l][b].is_zero() && !zeta[j * d + l].is_zero()) out[j * d + b] += zeta[j * d + l] * E[l][b];
  return out;
}

}  // namespace detail

// Pair groupoid M × M ⇉ M, arrows (x, y) with t = x, s = y.
inline GroupoidModel build_pair(const PolySympForm& w, const SamplePlan& plan) {
  Report ok = is_polysymplectic(w, plan);
  if (!ok.ok()) throw std::invalid_argument("build_pair: base form is not poly-symplectic (" + ok.first_failure()->name + ")");
  using namespace detail;
  std::size_t n = w.n(), N = 2 * n, P = 3 * n;
  GroupoidModel M;
  M.kind = "pair";
  M.plan = plan;
  auto& G = M.chart;
  G.N = N;
  G.n = n;
  G.P = P;
  G.t = PolyMap::coordinates(N, range_map(0, n));
  G.s = PolyMap::coordinates(N, range_map(n, n));
  G.eps = PolyMap(n, concat(vars(n, 0, n), vars(n, 0, n)));
  G.inv = PolyMap(N, concat(vars(N, n, n), vars(N, 0, n)));
  G.pr1 = PolyMap::coordinates(P, range_map(0, 2 * n));
  G.pr2 = PolyMap::coordinates(P, range_map(n, 2 * n));
  G.m = PolyMap(P, concat(vars(P, 0, n), vars(P, 2 * n, n)));
  G.left_unit = PolyMap(N, concat(vars(N, 0, n), vars(N, 0, 2 * n)));
  G.right_unit = PolyMap(N, concat(vars(N, 0, 2 * n), vars(N, n, n)));
  G.inverse_pair = PolyMap(N, concat(vars(N, 0, 2 * n), vars(N, 0, n)));
  auto base = default_names(n);
  for (const auto& x : base) G.names.push_back(x + "_t");
  for (const auto& x : base) G.names.push_back(x + "_s");
  M.omega = pullback(G.t, w) - pullback(G.s, w);
  std::vector<VectorField> anchor;
  for (std::size_t i = 0; i < n; ++i) {
    anchor.push_back(VectorField::coordinate(n, i));
    M.uR.push_back(VectorField::coordinate(N, i));
    M.mu.push_back(interior(VectorField::coordinate(n, i), w));
  }
  M.algebroid = zero_bracket_algebroid(n, anchor);
  return M;
}

// Covelocity bundle ⊕_k T*Q ⇉ Q with fibrewise addition; arrows (q, p^(1), ..., p^(k)).
inline GroupoidModel build_covelocity(std::size_t nq, std::size_t k, const SamplePlan& plan) {
  using namespace detail;
  if (nq == 0 || k == 0) throw std::invalid_argument("build_covelocity: nq and k must be positive");
  std::size_t n = nq, N = nq * (1 + k), fib = nq * k, P = N + fib;
  GroupoidModel M;
  M.kind = "covelocity";
  M.plan = plan;
  auto& G = M.chart;
  G.N = N;
  G.n = n;
  G.P = P;
  G.s = G.t = PolyMap::coordinates(N, range_map(0, n));
  G.eps = PolyMap(n, concat(vars(n, 0, n), PVec(fib, Poly(n))));
  PVec neg;
  for (std::size_t i = 0; i < fib; ++i) neg.push_back(-Poly::variable(N, n + i));
  G.inv = PolyMap(N, concat(vars(N, 0, n), neg));
  // parameters (q, p, p'): first factor (q, p), second (q, p')
  G.pr1 = PolyMap::coordinates(P, range_map(0, N));
  G.pr2 = PolyMap(P, concat(vars(P, 0, n), vars(P, N, fib)));
  PVec sum;
  for (std::size_t i = 0; i < fib; ++i) sum.push_back(Poly::variable(P, n + i) + Poly::variable(P, N + i));
  G.m = PolyMap(P, concat(vars(P, 0, n), sum));
  G.left_unit = PolyMap(N, concat(concat(vars(N, 0, n), PVec(fib, Poly(N))), vars(N, n, fib)));
  G.right_unit = PolyMap(N, concat(vars(N, 0, N), PVec(fib, Poly(N))));
  G.inverse_pair = PolyMap(N, concat(vars(N, 0, N), neg));
  G.names = covelocity_names(nq, k);
  M.omega = covelocities(nq, k);
  std::vector<VectorField> anchor;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < nq; ++i) {
      M.uR.push_back(VectorField::coordinate(N, n + j * nq + i));
      CoSection s(n, 1, k);
      s.add(j, {i}, Poly::constant(n, -1));
      M.mu.push_back(s);
      anchor.emplace_back(n);
    }
  M.algebroid = zero_bracket_algebroid(n, anchor);
  return M;
}

// Action groupoid G ⋉ (g*)^k of the diagonal coadjoint action, G nilpotent in exponential coordinates.
// Arrows (X, ζ) with s = ζ, t = Ad*_exp(X) ζ.
inline GroupoidModel build_coadjoint(const LieAlgebra& g, std::size_t k, const SamplePlan& plan) {
  using namespace detail;
  if (!g.antisymmetric() || !g.jacobi()) throw std::invalid_argument("build_coadjoint: structure constants fail Jacobi");
  std::size_t cls = g.nilpotency_class();
  if (cls == 0) throw std::invalid_argument("build_coadjoint: Lie algebra is not nilpotent, Ad* is not polynomial");
  if (cls > 4) throw std::invalid_argument("build_coadjoint: nilpotency class above 4 is not supported");
  if (k == 0) throw std::invalid_argument("build_coadjoint: k must be positive");
  std::size_t d = g.dim, n = k * d, N = d + n, P = 2 * d + n;
  GroupoidModel M;
  M.kind = "coadjoint";
  M.plan = plan;
  auto& G = M.chart;
  G.N = N;
  G.n = n;
  G.P = P;
  PVec X = vars(N, 0, d), Z = vars(N, d, n);
  G.s = PolyMap::coordinates(N, range_map(d, n));
  G.t = PolyMap(N, coadjoint_apply(g, k, X, Z, N));
  G.eps = PolyMap(n, concat(PVec(d, Poly(n)), vars(n, 0, n)));
  PVec negX;
  for (const auto& x : X) negX.push_back(-x);
  G.inv = PolyMap(N, concat(negX, G.t.components()));
  // parameters (X, Y, η): second factor (Y, η), first (X, Ad*_Y η)
  PVec pX = vars(P, 0, d), pY = vars(P, d, d), eta = vars(P, 2 * d, n);
  G.pr1 = PolyMap(P, concat(pX, coadjoint_apply(g, k, pY, eta, P)));
  G.pr2 = PolyMap(P, concat(pY, eta));
  G.m = PolyMap(P, concat(bch(g, pX, pY, P), eta));
  G.left_unit = PolyMap(N, concat(concat(PVec(d, Poly(N)), X), Z));
  G.right_unit = PolyMap(N, concat(concat(X, PVec(d, Poly(N))), Z));
  G.inverse_pair = PolyMap(N, concat(concat(X, negX), G.t.components()));
  for (std::size_t a = 0; a < d; ++a) G.names.push_back("x" + std::to_string(a + 1));
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t b = 0; b < d; ++b) G.names.push_back("z" + std::to_string(j + 1) + "_" + std::to_string(b + 1));

  // Jacobians of BCH: left Maurer-Cartan form (second argument) and right-invariant fields (first argument).
  std::size_t nv = 2 * d;
  PVec B = bch(g, vars(nv, 0, d), vars(nv, d, d), nv);
  PVec at_negX_X, at_0_X;
  for (std::size_t i = 0; i < d; ++i) at_negX_X.push_back(-X[i]);
  for (std::size_t i = 0; i < d; ++i) at_negX_X.push_back(X[i]);
  for (std::size_t i = 0; i < d; ++i) at_0_X.push_back(Poly(N));
  for (std::size_t i = 0; i < d; ++i) at_0_X.push_back(X[i]);
  KForm omega(N, 2, k);
  for (std::size_t a = 0; a < d; ++a) {
    VectorField u(N);
    for (std::size_t l = 0; l < d; ++l) u[l] = B[l].derivative(a).compose(at_0_X);
    M.uR.push_back(u);
  }
  for (std::size_t j = 0; j < k; ++j) {
    // θ_j = Σ_l ζ_{j,l} λ^l,  ω_j = −dθ_j
    KForm theta(N, 1, 1);
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t i = 0; i < d; ++i) {
        Poly r = B[l].derivative(d + i).compose(at_negX_X);
        if (!r.is_zero()) theta.add(0, {i}, Z[j * d + l] * r);
      }
    KForm dth = ext_d(theta);
    for (const auto& [idx, f] : dth.component(0)) omega.add(j, idx, -f);
  }
  M.omega = omega;
  PolyPoissonStruct lp = lie_poisson_direct_sum(g, k, plan);
  M.mu = lp.frame;
  LieAlgebroidData A = zero_bracket_algebroid(n, lp.anchor);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b)
      for (std::size_t e = 0; e < d; ++e)
        if (g.c[a][b][e] != 0) A.structure[a][b][e] = RatFun::constant(n, -g.c[a][b][e]);
  M.algebroid = A;
  return M;
}

// ω and μ with slot j removed; everything else unchanged.
inline GroupoidModel drop_component(const GroupoidModel& M, std::size_t j) {
  std::size_t k = M.omega.k();
  if (j >= k || k < 2) throw std::invalid_argument("drop_component: slot out of range or only one slot");
  auto drop = [&](const KForm& w) {
    KForm out(w.n(), w.r(), k - 1);
    for (std::size_t i = 0, slot = 0; i < k; ++i) {
      if (i == j) continue;
      for (const auto& [idx, f] : w.component(i)) out.add(slot, idx, f);
      ++slot;
    }
    return out;
  };
  GroupoidModel out = M;
  out.kind = M.kind + " without slot " + std::to_string(j + 1);
  out.omega = drop(M.omega);
  for (auto& m : out.mu) m = drop(m);
  return out;
}

// Direct product of two charts with concatenated ω.
struct ProductModel {
  GroupoidChart chart;
  KForm omega;
  PolyMap arrows1, arrows2;  // projections of the arrow space
  PolyMap comp1, comp2;      // projections of the composable parameter space
};

inline ProductModel product_model(const GroupoidModel& A, const GroupoidModel& B) {
  using namespace detail;
  const auto &G1 = A.chart, &G2 = B.chart;
  ProductModel out;
  auto& G = out.chart;
  G.N = G1.N + G2.N;
  G.n = G1.n + G2.n;
  G.P = G1.P + G2.P;
  out.arrows1 = PolyMap::coordinates(G.N, range_map(0, G1.N));
  out.arrows2 = PolyMap::coordinates(G.N, range_map(G1.N, G2.N));
  out.comp1 = PolyMap::coordinates(G.P, range_map(0, G1.P));
  out.comp2 = PolyMap::coordinates(G.P, range_map(G1.P, G2.P));
  PolyMap base1 = PolyMap::coordinates(G.n, range_map(0, G1.n)), base2 = PolyMap::coordinates(G.n, range_map(G1.n, G2.n));
  auto join = [](const PolyMap& f, const PolyMap& p, const PolyMap& g, const PolyMap& q) {
    return PolyMap(p.domain_dim(), concat(f.after(p).components(), g.after(q).components()));
  };
  G.s = join(G1.s, out.arrows1, G2.s, out.arrows2);
  G.t = join(G1.t, out.arrows1, G2.t, out.arrows2);
  G.inv = join(G1.inv, out.arrows1, G2.inv, out.arrows2);
  G.eps = join(G1.eps, base1, G2.eps, base2);
  G.pr1 = join(G1.pr1, out.comp1, G2.pr1, out.comp2);
  G.pr2 = join(G1.pr2, out.comp1, G2.pr2, out.comp2);
  G.m = join(G1.m, out.comp1, G2.m, out.comp2);
  G.names = G1.names;
  G.names.insert(G.names.end(), G2.names.begin(), G2.names.end());
  out.omega = product_polysymplectic({{A.omega, out.arrows1}, {B.omega, out.arrows2}});
  return out;
}

}  // namespace ppkit
