#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/polypoisson/lie_algebra.hpp"
#include "ppkit/polysymp/polysymp.hpp"

namespace ppkit {

struct PolyPoissonStruct {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<CoSection> frame;
  std::vector<VectorField> anchor;
  SamplePlan plan;
  std::vector<std::string> names;

  std::size_t rank() const { return frame.size(); }
  std::vector<std::string> labels() const { return names.empty() ? default_names(n) : names; }
};

struct LieAlgebroidData {
  std::size_t r = 0;
  std::size_t n = 0;
  std::vector<VectorField> anchor;
  // structure[a][b][e] = c_ab^e with [σ_a, σ_b] = Σ_e c_ab^e σ_e
  std::vector<std::vector<std::vector<RatFun>>> structure;
};

// Stacked coefficients of a k-tuple of 1-forms, index j·n + i.
inline std::vector<RatFun> stacked(const CoSection& s) {
  std::vector<RatFun> v(s.k() * s.n(), RatFun(s.n()));
  for (std::size_t j = 0; j < s.k(); ++j) {
    for (const auto& [idx, f] : s.component(j)) v[j * s.n() + idx[0]] = RatFun(f);
  }
  return v;
}

inline std::vector<Q> stacked_at(const CoSection& s, std::span<const Q> p) {
  std::vector<Q> v(s.k() * s.n());
  for (std::size_t j = 0; j < s.k(); ++j) {
    for (const auto& [idx, f] : s.component(j)) v[j * s.n() + idx[0]] = f.evaluate(p);
  }
  return v;
}

// (k·n)×r: column a is σ_a stacked.
inline Mat frame_matrix(const std::vector<CoSection>& frame, std::size_t n, std::size_t k) {
  Mat m(k * n, frame.size(), n);
  for (std::size_t a = 0; a < frame.size(); ++a) {
    auto v = stacked(frame[a]);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, a) = v[i];
  }
  return m;
}

// (r·k)×n: one row per component 1-form of each frame element; its kernel is S°.
inline Mat annihilator_matrix(const std::vector<CoSection>& frame, std::size_t n, std::size_t k) {
  Mat m(frame.size() * k, n, n);
  for (std::size_t a = 0; a < frame.size(); ++a) {
    for (std::size_t j = 0; j < k; ++j) {
      for (const auto& [idx, f] : frame[a].component(j)) m(a * k + j, idx[0]) = RatFun(f);
    }
  }
  return m;
}

inline CoSection bracket(const PolyPoissonStruct& pp, std::size_t a, std::size_t b) {
  return lie_derivative(pp.anchor[a], pp.frame[b]) - interior(pp.anchor[b], ext_d(pp.frame[a]));
}

namespace detail {

inline bool functions_zero(const KForm& f) { return f.is_zero(); }

inline std::vector<RatFun> apply_field(const VectorField& X, const std::vector<RatFun>& c) {
  std::vector<RatFun> out;
  for (const auto& f : c) {
    RatFun acc(X.n());
    for (std::size_t i = 0; i < X.n(); ++i) {
      if (!X[i].is_zero()) acc += RatFun(X[i]) * f.derivative(i);
    }
    out.push_back(acc);
  }
  return out;
}

// Σ_a c_a X_a as rational components.
inline std::vector<RatFun> combine_fields(const std::vector<VectorField>& X, const std::vector<RatFun>& c, std::size_t n) {
  std::vector<RatFun> out(n, RatFun(n));
  for (std::size_t a = 0; a < X.size(); ++a) {
    if (c[a].is_zero()) continue;
    for (std::size_t i = 0; i < n; ++i) {
      if (!X[a][i].is_zero()) out[i] += c[a] * RatFun(X[a][i]);
    }
  }
  return out;
}

inline std::string rat_vector_str(const std::vector<RatFun>& v, std::span<const std::string> names) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += v[i].to_string(names);
  }
  return s + ")";
}

// Sample points at which some denominator vanishes.
inline std::vector<Point> vanishing_points(const std::vector<Poly>& dens, const SamplePlan& plan, std::size_t n) {
  std::vector<Point> out;
  if (dens.empty()) return out;
  for (const auto& p : sample_points(plan_for(plan, n), n)) {
    for (const auto& d : dens) {
      if (d.evaluate(p) == 0) {
        out.push_back(p);
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

struct ClosureData {
  // coeffs[a][b] for a < b; empty optional when the bracket leaves the frame span.
  std::vector<std::vector<std::optional<std::vector<RatFun>>>> coeffs;
  std::vector<Poly> denominators;
};

inline ClosureData closure_data(const PolyPoissonStruct& pp) {
  ClosureData out;
  std::size_t r = pp.rank();
  out.coeffs.assign(r, std::vector<std::optional<std::vector<RatFun>>>(r));
  Mat fm = frame_matrix(pp.frame, pp.n, pp.k);
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = a + 1; b < r; ++b) {
      auto c = solve_membership(fm, stacked(bracket(pp, a, b)));
      if (c) {
        for (const auto& x : *c) {
          if (!x.den().is_constant()) out.denominators.push_back(x.den());
        }
      }
      out.coeffs[a][b] = std::move(c);
    }
  }
  return out;
}

inline void add_frame_rank_check(Report& rep, const PolyPoissonStruct& pp) {
  timed(rep, [&](Report& r) {
    Check c = rank_check("frame_rank", frame_matrix(pp.frame, pp.n, pp.k), pp.rank(), pp.plan);
    c.detail = "frame spans a subbundle: " + c.detail;
    r.checks.push_back(std::move(c));
  });
}

inline void add_antisymmetry_check(Report& rep, const PolyPoissonStruct& pp) {
  timed(rep, [&](Report& r) {
    auto names = pp.labels();
    Check c{"antisymmetry", Verdict::Pass, "i_{P(a)} b + i_{P(b)} a = 0 for all frame pairs", {}, 0};
    for (std::size_t a = 0; a < pp.rank(); ++a) {
      for (std::size_t b = a; b < pp.rank(); ++b) {
        KForm s = interior(pp.anchor[a], pp.frame[b]) + interior(pp.anchor[b], pp.frame[a]);
        if (!s.is_zero()) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("pair (" + std::to_string(a) + ", " + std::to_string(b) + "): " + s.to_string(names));
        }
      }
    }
    r.checks.push_back(std::move(c));
  });
}

inline void add_annihilator_check(Report& rep, const PolyPoissonStruct& pp) {
  timed(rep, [&](Report& r) {
    Check c = rank_check("annihilator", annihilator_matrix(pp.frame, pp.n, pp.k), pp.n, pp.plan);
    c.detail = "annihilator of S is zero: " + c.detail;
    r.checks.push_back(std::move(c));
  });
}

inline void add_closure_checks(Report& rep, const PolyPoissonStruct& pp, const ClosureData& cd) {
  auto names = pp.labels();
  timed(rep, [&](Report& r) {
    Check c{"closure", Verdict::Pass, "brackets of frame elements lie in the frame span", {}, 0};
    for (std::size_t a = 0; a < pp.rank(); ++a) {
      for (std::size_t b = a + 1; b < pp.rank(); ++b) {
        if (!cd.coeffs[a][b]) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("[" + std::to_string(a) + ", " + std::to_string(b) +
                                "] = " + bracket(pp, a, b).to_string(names) + " is not in the span");
        }
      }
    }
    if (c.verdict == Verdict::Pass) {
      auto bad = detail::vanishing_points(cd.denominators, pp.plan, pp.n);
      if (!bad.empty()) {
        c.verdict = Verdict::Warn;
        c.detail += "; coefficient denominators vanish at sample points";
        for (const auto& p : bad) c.witnesses.push_back("denominator zero at " + point_str(p));
      } else if (!cd.denominators.empty()) {
        c.detail += " (rational coefficients, denominators nonzero at all sample points)";
      }
    }
    r.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& r) {
    Check c{"anchor_bracket", Verdict::Pass, "P[a, b] = [P(a), P(b)] for all frame pairs", {}, 0};
    for (std::size_t a = 0; a < pp.rank(); ++a) {
      for (std::size_t b = a + 1; b < pp.rank(); ++b) {
        if (!cd.coeffs[a][b]) continue;
        auto lhs = detail::combine_fields(pp.anchor, *cd.coeffs[a][b], pp.n);
        VectorField rhs = lie_bracket(pp.anchor[a], pp.anchor[b]);
        std::vector<RatFun> diff;
        bool zero = true;
        for (std::size_t i = 0; i < pp.n; ++i) {
          diff.push_back(lhs[i] - RatFun(rhs[i]));
          zero = zero && diff.back().is_zero();
        }
        if (!zero) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("pair (" + std::to_string(a) + ", " + std::to_string(b) +
                                "): residual " + detail::rat_vector_str(diff, names));
        }
      }
    }
    if (c.verdict == Verdict::Pass) {
      for (std::size_t a = 0; a < pp.rank() && c.verdict == Verdict::Pass; ++a)
        for (std::size_t b = a + 1; b < pp.rank(); ++b)
          if (!cd.coeffs[a][b]) {
            c.verdict = Verdict::Fail;
            c.detail += "; not decidable where closure failed";
            break;
          }
    }
    r.checks.push_back(std::move(c));
  });
}

inline Report check_structure(const PolyPoissonStruct& pp) {
  Report rep;
  rep.subject = "poly-Poisson structure";
  if (pp.anchor.size() != pp.frame.size()) {
    rep.add("shape", Verdict::Error, "anchor list length differs from frame length");
    return rep;
  }
  add_frame_rank_check(rep, pp);
  add_antisymmetry_check(rep, pp);
  add_annihilator_check(rep, pp);
  add_closure_checks(rep, pp, closure_data(pp));
  return rep;
}

inline Report check_weak(const PolyPoissonStruct& pp) {
  Report rep;
  rep.subject = "weak poly-Poisson structure";
  add_frame_rank_check(rep, pp);
  add_antisymmetry_check(rep, pp);
  timed(rep, [&](Report& r) {
    Check c{"image_meets_annihilator", Verdict::Pass, "Im P and the annihilator of S meet only in 0 at every sample point", {}, 0};
    Mat ann = annihilator_matrix(pp.frame, pp.n, pp.k);
    for (const auto& p : sample_points(plan_for(pp.plan, pp.n), pp.n)) {
      auto ker = nullspace(*ann.evaluate(p));
      std::vector<std::vector<Q>> im;
      for (const auto& X : pp.anchor) im.push_back(X.evaluate(p));
      auto meet = intersect_spans(im, ker, pp.n);
      if (!meet.empty()) {
        c.verdict = Verdict::Fail;
        c.witnesses.push_back("intersection of dimension " + std::to_string(meet.size()) + " at " + point_str(p));
      }
    }
    r.checks.push_back(std::move(c));
  });
  add_closure_checks(rep, pp, closure_data(pp));
  return rep;
}

inline LieAlgebroidData to_algebroid(const PolyPoissonStruct& pp) {
  Report rep = check_structure(pp);
  if (!rep.ok()) {
    const Check* f = rep.first_failure();
    throw std::runtime_error("to_algebroid: structure check failed (" + f->name + ")");
  }
  ClosureData cd = closure_data(pp);
  LieAlgebroidData A;
  A.r = pp.rank();
  A.n = pp.n;
  A.anchor = pp.anchor;
  A.structure.assign(A.r, std::vector<std::vector<RatFun>>(A.r, std::vector<RatFun>(A.r, RatFun(pp.n))));
  for (std::size_t a = 0; a < A.r; ++a) {
    for (std::size_t b = a + 1; b < A.r; ++b) {
      A.structure[a][b] = *cd.coeffs[a][b];
      for (std::size_t e = 0; e < A.r; ++e) A.structure[b][a][e] = -A.structure[a][b][e];
    }
  }
  return A;
}

// Cyclic sum of [a,[b,c]] expanded through structure coefficients; zero for a Lie algebroid.
inline std::vector<RatFun> jacobiator(const LieAlgebroidData& A, std::size_t a, std::size_t b, std::size_t c) {
  std::vector<RatFun> out(A.r, RatFun(A.n));
  auto term = [&](std::size_t x, std::size_t y, std::size_t z) {
    const auto& cyz = A.structure[y][z];
    auto dx = detail::apply_field(A.anchor[x], cyz);
    for (std::size_t f = 0; f < A.r; ++f) {
      RatFun s = dx[f];
      for (std::size_t e = 0; e < A.r; ++e) {
        if (cyz[e].is_zero() || A.structure[x][e][f].is_zero()) continue;
        s += cyz[e] * A.structure[x][e][f];
      }
      out[f] += s;
    }
  };
  term(a, b, c);
  term(b, c, a);
  term(c, a, b);
  return out;
}

inline PolyPoissonStruct from_polysymplectic(const PolySympForm& w, const SamplePlan& plan,
                                             std::vector<std::string> names = {}) {
  Report rep = is_polysymplectic(w, plan);
  if (!rep.ok()) throw std::invalid_argument("from_polysymplectic: form is not poly-symplectic (" + rep.first_failure()->name + ")");
  PolyPoissonStruct pp;
  pp.n = w.n();
  pp.k = w.k();
  pp.plan = plan;
  pp.names = std::move(names);
  for (std::size_t i = 0; i < w.n(); ++i) {
    pp.frame.push_back(interior(VectorField::coordinate(w.n(), i), w));
    pp.anchor.push_back(VectorField::coordinate(w.n(), i));
  }
  return pp;
}

// S = ⊕_k T*R^n, P = 0; frame ordered slot-major.
inline PolyPoissonStruct trivial_structure(std::size_t n, std::size_t k, const SamplePlan& plan) {
  PolyPoissonStruct pp;
  pp.n = n;
  pp.k = k;
  pp.plan = plan;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      CoSection s(n, 1, k);
      s.add(j, {i}, Poly::constant(n, 1));
      pp.frame.push_back(s);
      pp.anchor.emplace_back(n);
    }
  }
  return pp;
}

// k = 1 structure of a bivector: frame dx_i, anchor π^♯(dx_i) = Σ_l π_il ∂_l.
inline PolyPoissonStruct bivector_structure(const std::vector<std::vector<Poly>>& pi, const SamplePlan& plan) {
  std::size_t n = pi.size();
  PolyPoissonStruct pp;
  pp.n = n;
  pp.k = 1;
  pp.plan = plan;
  for (std::size_t i = 0; i < n; ++i) {
    CoSection s(n, 1, 1);
    s.add(0, {i}, Poly::constant(n, 1));
    pp.frame.push_back(s);
    pp.anchor.emplace_back(pi[i]);
  }
  return pp;
}

inline bool antisymmetric(const std::vector<std::vector<Poly>>& pi) {
  for (std::size_t i = 0; i < pi.size(); ++i)
    for (std::size_t l = 0; l < pi.size(); ++l)
      if (!(pi[i][l] + pi[l][i]).is_zero()) return false;
  return true;
}

inline PolyPoissonStruct product_of_poisson(const std::vector<std::vector<std::vector<Poly>>>& bivectors,
                                            const SamplePlan& plan) {
  std::size_t total = 0;
  for (const auto& pi : bivectors) {
    if (!antisymmetric(pi)) throw std::invalid_argument("product_of_poisson: factor is not antisymmetric");
    std::size_t nj = pi.size();
    if (!check_structure(bivector_structure(pi, plan_for(plan, nj))).ok()) {
      throw std::invalid_argument("product_of_poisson: factor fails the Jacobi identity");
    }
    total += nj;
  }
  std::size_t k = bivectors.size();
  PolyPoissonStruct pp;
  pp.n = total;
  pp.k = k;
  pp.plan = plan;
  std::size_t offset = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto& pi = bivectors[j];
    std::size_t nj = pi.size();
    std::vector<std::size_t> map;
    for (std::size_t i = 0; i < nj; ++i) map.push_back(offset + i);
    for (std::size_t i = 0; i < nj; ++i) {
      CoSection s(total, 1, k);
      s.add(j, {offset + i}, Poly::constant(total, 1));
      VectorField X(total);
      for (std::size_t l = 0; l < nj; ++l) X[offset + l] = pi[i][l].embed(total, map);
      pp.frame.push_back(s);
      pp.anchor.push_back(X);
    }
    offset += nj;
  }
  return pp;
}

// Coordinates ζ_{j,b} at index j·dim + b.
inline PolyPoissonStruct lie_poisson_direct_sum(const LieAlgebra& g, std::size_t k, const SamplePlan& plan) {
  if (!g.antisymmetric() || !g.jacobi()) throw std::invalid_argument("lie_poisson_direct_sum: structure constants fail Jacobi");
  std::size_t d = g.dim, n = k * d;
  PolyPoissonStruct pp;
  pp.n = n;
  pp.k = k;
  pp.plan = plan;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t b = 0; b < d; ++b) pp.names.push_back("z" + std::to_string(j + 1) + "_" + std::to_string(b + 1));
  for (std::size_t a = 0; a < d; ++a) {
    CoSection s(n, 1, k);
    VectorField X(n);
    for (std::size_t j = 0; j < k; ++j) {
      s.add(j, {j * d + a}, Poly::constant(n, 1));
      // (ad*_a ζ_j)_b = −Σ_l c_ab^l ζ_{j,l}
      for (std::size_t b = 0; b < d; ++b) {
        Poly comp(n);
        for (std::size_t l = 0; l < d; ++l) {
          if (g.c[a][b][l] != 0) comp -= g.c[a][b][l] * Poly::variable(n, j * d + l);
        }
        X[j * d + b] = comp;
      }
    }
    pp.frame.push_back(s);
    pp.anchor.push_back(X);
  }
  return pp;
}

// Pullback of a target frame element along f: component j = Σ_i (τ_{j,i}∘f) d f_i.
inline CoSection pull_cosection(const PolyMap& f, const CoSection& tau) { return pullback(f, tau); }

inline Report is_morphism(const PolyMap& f, const PolyPoissonStruct& source, const PolyPoissonStruct& target) {
  Report rep;
  rep.subject = "poly-Poisson morphism";
  if (f.domain_dim() != source.n || f.codomain_dim() != target.n || source.k != target.k) {
    rep.add("shape", Verdict::Error, "map dimensions do not match the structures");
    return rep;
  }
  auto names = source.labels();
  Mat fm = frame_matrix(source.frame, source.n, source.k);
  std::vector<std::optional<std::vector<RatFun>>> coeffs;
  std::vector<Poly> dens;
  timed(rep, [&](Report& r) {
    Check c{"pullback_in_source", Verdict::Pass, "pullbacks of target frame elements lie in the source span", {}, 0};
    for (std::size_t t = 0; t < target.rank(); ++t) {
      CoSection pulled = pull_cosection(f, target.frame[t]);
      auto sol = solve_membership(fm, stacked(pulled));
      if (!sol) {
        c.verdict = Verdict::Fail;
        c.witnesses.push_back("target element " + std::to_string(t) + " pulls back to " + pulled.to_string(names) +
                              ", outside the source span");
      } else {
        for (const auto& x : *sol)
          if (!x.den().is_constant()) dens.push_back(x.den());
      }
      coeffs.push_back(std::move(sol));
    }
    auto bad = detail::vanishing_points(dens, source.plan, source.n);
    if (c.verdict == Verdict::Pass && !bad.empty()) {
      c.verdict = Verdict::Warn;
      for (const auto& p : bad) c.witnesses.push_back("denominator zero at " + point_str(p));
    }
    r.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& r) {
    Check c{"anchor_pushforward", Verdict::Pass, "Df P1(f* tau) = P2(tau) o f for every target frame element", {}, 0};
    auto J = f.jacobian();
    for (std::size_t t = 0; t < target.rank(); ++t) {
      if (!coeffs[t]) {
        c.verdict = Verdict::Fail;
        c.witnesses.push_back("target element " + std::to_string(t) + ": no source preimage");
        continue;
      }
      auto field = detail::combine_fields(source.anchor, *coeffs[t], source.n);
      auto rhs = compose_field(target.anchor[t], f);
      std::vector<RatFun> diff;
      bool zero = true;
      for (std::size_t i = 0; i < target.n; ++i) {
        RatFun s(source.n);
        for (std::size_t l = 0; l < source.n; ++l) {
          if (!J[i][l].is_zero() && !field[l].is_zero()) s += RatFun(J[i][l]) * field[l];
        }
        diff.push_back(s - RatFun(rhs[i]));
        zero = zero && diff.back().is_zero();
      }
      if (!zero) {
        c.verdict = Verdict::Fail;
        c.witnesses.push_back("target element " + std::to_string(t) + ": residual " + detail::rat_vector_str(diff, names));
      }
    }
    r.checks.push_back(std::move(c));
  });
  return rep;
}

// Pointwise comparison: same span and, after matching frames, same anchors.
inline Report compare_structures(const PolyPoissonStruct& a, const PolyPoissonStruct& b, const SamplePlan& plan) {
  Report rep;
  rep.subject = "structure comparison";
  if (a.n != b.n || a.k != b.k) {
    rep.add("shape", Verdict::Fail, "dimensions differ");
    return rep;
  }
  std::size_t n = a.n, k = a.k;
  Check span{"same_span", Verdict::Pass, "frames span the same subspace at every sample point", {}, 0};
  Check anch{"same_anchor", Verdict::Pass, "anchors agree on every element of the common span", {}, 0};
  Mat fa = frame_matrix(a.frame, n, k), fb = frame_matrix(b.frame, n, k);
  for (const auto& p : sample_points(plan_for(plan, n), n)) {
    QMat ma = *fa.evaluate(p), mb = *fb.evaluate(p);
    std::vector<std::vector<Q>> ca, cb;
    for (std::size_t i = 0; i < a.rank(); ++i) ca.push_back(ma.column(i));
    for (std::size_t i = 0; i < b.rank(); ++i) cb.push_back(mb.column(i));
    std::size_t ra = span_rank(ca, k * n), rb = span_rank(cb, k * n);
    auto both = ca;
    both.insert(both.end(), cb.begin(), cb.end());
    std::size_t rab = span_rank(both, k * n);
    if (ra != rb || rab != ra) {
      span.verdict = Verdict::Fail;
      span.witnesses.push_back("ranks " + std::to_string(ra) + ", " + std::to_string(rb) + ", joint " +
                               std::to_string(rab) + " at " + point_str(p));
      continue;
    }
    // For each element of b, write it in a's frame and compare anchors.
    QMat sys(k * n, a.rank() + 1);
    for (std::size_t e = 0; e < b.rank(); ++e) {
      QMat aug(k * n, a.rank() + 1);
      for (std::size_t i = 0; i < k * n; ++i) {
        for (std::size_t c = 0; c < a.rank(); ++c) aug(i, c) = ma(i, c);
        aug(i, a.rank()) = mb(i, e);
      }
      auto piv = rref(aug);
      std::vector<Q> coef(a.rank());
      for (std::size_t row = 0; row < piv.size(); ++row) {
        if (piv[row] < a.rank()) coef[piv[row]] = aug(row, a.rank());
      }
      std::vector<Q> pa(n);
      for (std::size_t c = 0; c < a.rank(); ++c) {
        if (coef[c] == 0) continue;
        auto v = a.anchor[c].evaluate(p);
        for (std::size_t i = 0; i < n; ++i) pa[i] += coef[c] * v[i];
      }
      if (pa != b.anchor[e].evaluate(p)) {
        anch.verdict = Verdict::Fail;
        anch.witnesses.push_back("element " + std::to_string(e) + " at " + point_str(p));
      }
    }
  }
  rep.checks.push_back(span);
  rep.checks.push_back(anch);
  return rep;
}

}  // namespace ppkit
