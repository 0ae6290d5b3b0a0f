#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/polypoisson/structure.hpp"

namespace ppkit {

// Arrows g with s(g) = source, t(g) = target; (g, h) composable iff s(g) = t(h), product gh.
struct GroupoidChart {
  std::size_t N = 0;
  std::size_t n = 0;
  PolyMap s, t;
  PolyMap eps;
  PolyMap inv;
  std::size_t P = 0;
  PolyMap pr1, pr2, m;
  // Optional parametrizations ℝ^N → ℝ^P of (ε(t(g)), g), (g, ε(s(g))) and (g, g⁻¹).
  std::optional<PolyMap> left_unit, right_unit, inverse_pair;
  std::vector<std::string> names;
};

using IMForm = std::vector<CoSection>;

struct GroupoidModel {
  std::string kind;
  GroupoidChart chart;
  KForm omega;
  LieAlgebroidData algebroid;
  IMForm mu;
  std::vector<VectorField> uR;
  SamplePlan plan;
};

namespace detail {

inline std::string map_residual(const PolyMap& a, const PolyMap& b, std::span<const std::string> names = {}) {
  std::string s;
  for (std::size_t i = 0; i < a.codomain_dim(); ++i) {
    Poly d = a[i] - b[i];
    if (d.is_zero()) continue;
    if (!s.empty()) s += "; ";
    s += "component " + std::to_string(i) + ": " + d.to_string(names);
  }
  return s;
}

inline void identity_check(Check& c, const std::string& label, const PolyMap& a, const PolyMap& b) {
  if (a.domain_dim() != b.domain_dim() || a.codomain_dim() != b.codomain_dim()) {
    c.verdict = Verdict::Fail;
    c.witnesses.push_back(label + ": dimension mismatch");
    return;
  }
  if (!(a == b)) {
    c.verdict = Verdict::Fail;
    c.witnesses.push_back(label + ": residual " + map_residual(a, b));
  }
}

}  // namespace detail

inline Report check_groupoid_axioms(const GroupoidChart& G) {
  Report rep;
  rep.subject = "groupoid chart";
  timed(rep, [&](Report& out) {
    Check c{"structure_maps", Verdict::Pass, "source, target, unit, inverse and multiplication identities", {}, 0};
    PolyMap idn = PolyMap::identity(G.n);
    detail::identity_check(c, "s o pr1 = t o pr2", G.s.after(G.pr1), G.t.after(G.pr2));
    detail::identity_check(c, "s o eps = id", G.s.after(G.eps), idn);
    detail::identity_check(c, "t o eps = id", G.t.after(G.eps), idn);
    detail::identity_check(c, "s o m = s o pr2", G.s.after(G.m), G.s.after(G.pr2));
    detail::identity_check(c, "t o m = t o pr1", G.t.after(G.m), G.t.after(G.pr1));
    detail::identity_check(c, "s o inv = t", G.s.after(G.inv), G.t);
    detail::identity_check(c, "t o inv = s", G.t.after(G.inv), G.s);
    out.checks.push_back(std::move(c));
  });
  if (G.left_unit || G.right_unit || G.inverse_pair) {
    timed(rep, [&](Report& out) {
      Check c{"unit_and_inverse_laws", Verdict::Pass, "units are neutral and inverses compose to units", {}, 0};
      PolyMap idN = PolyMap::identity(G.N);
      if (G.left_unit) {
        detail::identity_check(c, "left unit: first factor", G.pr1.after(*G.left_unit), G.eps.after(G.t));
        detail::identity_check(c, "left unit: second factor", G.pr2.after(*G.left_unit), idN);
        detail::identity_check(c, "left unit: product", G.m.after(*G.left_unit), idN);
      }
      if (G.right_unit) {
        detail::identity_check(c, "right unit: first factor", G.pr1.after(*G.right_unit), idN);
        detail::identity_check(c, "right unit: second factor", G.pr2.after(*G.right_unit), G.eps.after(G.s));
        detail::identity_check(c, "right unit: product", G.m.after(*G.right_unit), idN);
      }
      if (G.inverse_pair) {
        detail::identity_check(c, "inverse: first factor", G.pr1.after(*G.inverse_pair), idN);
        detail::identity_check(c, "inverse: second factor", G.pr2.after(*G.inverse_pair), G.inv);
        detail::identity_check(c, "inverse: product", G.m.after(*G.inverse_pair), G.eps.after(G.t));
      }
      out.checks.push_back(std::move(c));
    });
  }
  return rep;
}

inline Report check_multiplicative(const GroupoidChart& G, const KForm& theta) {
  Report rep;
  rep.subject = "multiplicative form";
  timed(rep, [&](Report& out) {
    KForm res = pullback(G.m, theta) - pullback(G.pr1, theta) - pullback(G.pr2, theta);
    Check& c = out.add("multiplicative", res.is_zero() ? Verdict::Pass : Verdict::Fail, "m*theta = pr1*theta + pr2*theta");
    if (!res.is_zero()) c.witnesses.push_back("residual " + res.to_string());
  });
  return rep;
}

inline Report check_unit_inv(const GroupoidChart& G, const KForm& theta) {
  Report rep;
  rep.subject = "unit and inverse pullbacks";
  timed(rep, [&](Report& out) {
    KForm e = pullback(G.eps, theta);
    Check& c = out.add("unit_pullback", e.is_zero() ? Verdict::Pass : Verdict::Fail, "eps*theta = 0");
    if (!e.is_zero()) c.witnesses.push_back("eps*theta = " + e.to_string());
  });
  timed(rep, [&](Report& out) {
    KForm i = pullback(G.inv, theta) + theta;
    Check& c = out.add("inverse_pullback", i.is_zero() ? Verdict::Pass : Verdict::Fail, "inv*theta = -theta");
    if (!i.is_zero()) c.witnesses.push_back("inv*theta + theta = " + i.to_string());
  });
  return rep;
}

// Σ_e c_e μ_e with rational coefficients, as stacked coefficient functions.
inline std::vector<RatFun> combine_cosections(const std::vector<CoSection>& mu, const std::vector<RatFun>& c, std::size_t n,
                                              std::size_t k) {
  std::vector<RatFun> out(k * n, RatFun(n));
  for (std::size_t e = 0; e < mu.size(); ++e) {
    if (c[e].is_zero()) continue;
    auto v = stacked(mu[e]);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].is_zero()) out[i] += c[e] * v[i];
  }
  return out;
}

inline Report check_im_form(const LieAlgebroidData& A, const IMForm& mu, const SamplePlan& plan) {
  Report rep;
  rep.subject = "IM poly-symplectic form";
  if (mu.size() != A.r || A.anchor.size() != A.r) {
    rep.add("shape", Verdict::Error, "mu and anchor lengths must equal the algebroid rank");
    return rep;
  }
  std::size_t n = A.n, k = mu.empty() ? 1 : mu.front().k(), r = A.r;
  timed(rep, [&](Report& out) {
    Check c{"im_antisymmetry", Verdict::Pass, "i_rho(u) mu(v) + i_rho(v) mu(u) = 0", {}, 0};
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a; b < r; ++b) {
        KForm s = interior(A.anchor[a], mu[b]) + interior(A.anchor[b], mu[a]);
        if (!s.is_zero()) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("pair (" + std::to_string(a) + ", " + std::to_string(b) + "): " + s.to_string());
        }
      }
    out.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& out) {
    Check c{"im_bracket", Verdict::Pass, "mu([u, v]) = L_rho(u) mu(v) - i_rho(v) d mu(u)", {}, 0};
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) {
        if (a == b) continue;
        auto lhs = combine_cosections(mu, A.structure[a][b], n, k);
        auto rhs = stacked(lie_derivative(A.anchor[a], mu[b]) - interior(A.anchor[b], ext_d(mu[a])));
        for (std::size_t i = 0; i < lhs.size(); ++i) {
          if (!(lhs[i] == rhs[i])) {
            c.verdict = Verdict::Fail;
            c.witnesses.push_back("pair (" + std::to_string(a) + ", " + std::to_string(b) + ") entry " + std::to_string(i) +
                                  ": residual " + (lhs[i] - rhs[i]).to_string());
            break;
          }
        }
      }
    out.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& out) {
    Check ker = rank_check("im_kernel", frame_matrix(mu, n, k), r, plan);
    ker.detail = "mu is injective: " + ker.detail;
    Check ann = rank_check("im_annihilator", annihilator_matrix(mu, n, k), n, plan);
    ann.detail = "annihilator of the image of mu is zero: " + ann.detail;
    out.checks.push_back(std::move(ker));
    out.checks.push_back(std::move(ann));
  });
  return rep;
}

inline Report check_compatibility(const GroupoidModel& M) {
  Report rep;
  rep.subject = "compatibility of omega, mu and the right-invariant fields";
  const auto& G = M.chart;
  timed(rep, [&](Report& out) {
    Check c{"contraction", Verdict::Pass, "i_{u^R} omega = t*(mu(u))", {}, 0};
    for (std::size_t a = 0; a < M.uR.size(); ++a) {
      KForm res = interior(M.uR[a], M.omega) - pullback(G.t, M.mu[a]);
      if (!res.is_zero()) {
        c.verdict = Verdict::Fail;
        c.witnesses.push_back("element " + std::to_string(a) + ": residual " + res.to_string());
      }
    }
    out.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& out) {
    Check c{"anchor_along_units", Verdict::Pass, "dt(u^R) along units equals rho(u)", {}, 0};
    for (std::size_t a = 0; a < M.uR.size(); ++a) {
      PolyMap pushed(G.N, push_forward(G.t, M.uR[a]));
      PolyMap along = pushed.after(G.eps);
      PolyMap rho(G.n, M.algebroid.anchor[a].coeffs());
      if (!(along == rho)) {
        c.verdict = Verdict::Fail;
        c.witnesses.push_back("element " + std::to_string(a) + ": residual " + detail::map_residual(along, rho));
      }
    }
    out.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& out) {
    // [u^R, v^R] = Σ_e (c_uv^e ∘ t) u^R_e
    Check c{"right_invariant_bracket", Verdict::Pass, "brackets of right-invariant fields follow the algebroid bracket", {}, 0};
    std::size_t r = M.uR.size();
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a + 1; b < r; ++b) {
        VectorField br = lie_bracket(M.uR[a], M.uR[b]);
        std::vector<RatFun> sum(G.N, RatFun(G.N));
        for (std::size_t e = 0; e < r; ++e) {
          const RatFun& ce = M.algebroid.structure[a][b][e];
          if (ce.is_zero()) continue;
          RatFun pulled = ce.compose(G.t.components());
          for (std::size_t i = 0; i < G.N; ++i)
            if (!M.uR[e][i].is_zero()) sum[i] += pulled * RatFun(M.uR[e][i]);
        }
        for (std::size_t i = 0; i < G.N; ++i)
          if (!(sum[i] == RatFun(br[i]))) {
            c.verdict = Verdict::Fail;
            c.witnesses.push_back("pair (" + std::to_string(a) + ", " + std::to_string(b) + ") component " + std::to_string(i));
            break;
          }
      }
    out.checks.push_back(std::move(c));
  });
  return rep;
}

// Everything the module can check about a model, in a fixed order.
inline Report check_model(const GroupoidModel& M) {
  Report rep;
  rep.subject = M.kind + " groupoid model";
  rep.absorb(check_groupoid_axioms(M.chart), "axioms");
  rep.absorb(check_multiplicative(M.chart, M.omega), "omega");
  rep.absorb(check_unit_inv(M.chart, M.omega), "omega");
  rep.absorb(is_polysymplectic(M.omega, M.plan), "omega");
  rep.absorb(check_im_form(M.algebroid, M.mu, plan_for(M.plan, M.chart.n)), "mu");
  rep.absorb(check_compatibility(M), "compatibility");
  return rep;
}

inline PolyPoissonStruct induced_structure(const GroupoidModel& M) {
  Report pre = check_model(M);
  if (!pre.ok()) throw std::invalid_argument("induced_structure: model check failed (" + pre.first_failure()->name + ")");
  PolyPoissonStruct pp;
  pp.n = M.chart.n;
  pp.k = M.omega.k();
  pp.plan = plan_for(M.plan, M.chart.n);
  pp.frame = M.mu;
  pp.anchor = M.algebroid.anchor;
  return pp;
}

// Target map is a morphism from the arrows' poly-symplectic structure to the induced one.
inline Report target_is_morphism(const GroupoidModel& M, const PolyPoissonStruct& base) {
  return is_morphism(M.chart.t, from_polysymplectic(M.omega, M.plan), base);
}

// Joint kernel of ω on arrows is zero iff μ is nondegenerate on the base: both sides reported.
struct NondegeneracyPair {
  bool omega_nondegenerate = false;
  bool im_nondegenerate = false;
};

inline NondegeneracyPair nondegeneracy_pair(const GroupoidModel& M) {
  NondegeneracyPair p;
  p.omega_nondegenerate = is_polysymplectic(M.omega, M.plan).verdict_of("nondegenerate") == Verdict::Pass;
  Report im = check_im_form(M.algebroid, M.mu, plan_for(M.plan, M.chart.n));
  p.im_nondegenerate = im.verdict_of("im_kernel") == Verdict::Pass && im.verdict_of("im_annihilator") == Verdict::Pass;
  return p;
}

}  // namespace ppkit
