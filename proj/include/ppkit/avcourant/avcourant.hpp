#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/polypoisson/structure.hpp"

namespace ppkit {

struct AVSection {
  VectorField X;
  CoSection eta;

  std::size_t n() const { return X.n(); }
  std::size_t k() const { return eta.k(); }

  friend bool operator==(const AVSection& a, const AVSection& b) {
    for (std::size_t i = 0; i < a.X.n(); ++i)
      if (!(a.X[i] == b.X[i])) return false;
    return a.eta == b.eta;
  }
  friend AVSection operator+(const AVSection& a, const AVSection& b) {
    VectorField X = a.X;
    X += b.X;
    return {X, a.eta + b.eta};
  }
  friend AVSection operator*(const Poly& f, const AVSection& v) { return {f * v.X, f * v.eta}; }

  std::string to_string(std::span<const std::string> names = {}) const {
    return X.to_string(names) + " + " + eta.to_string(names);
  }
};

struct AVSubbundle {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<AVSection> frame;
  SamplePlan plan;
};

inline std::vector<Poly> pairing(const AVSection& v, const AVSection& w) {
  if (v.n() != w.n() || v.k() != w.k()) throw std::invalid_argument("pairing: shape mismatch");
  KForm a = interior(v.X, w.eta) + interior(w.X, v.eta);
  std::vector<Poly> out;
  for (std::size_t j = 0; j < v.k(); ++j) out.push_back(a.coeff(j, {}));
  return out;
}

inline AVSection dorfman(const AVSection& v, const AVSection& w) {
  if (v.n() != w.n() || v.k() != w.k()) throw std::invalid_argument("dorfman: shape mismatch");
  return {lie_bracket(v.X, w.X), lie_derivative(v.X, w.eta) - interior(w.X, ext_d(v.eta))};
}

// Coordinates on the fibre: X (n entries) then η stacked j·n + i.
inline std::vector<RatFun> av_vector(const AVSection& v) {
  std::vector<RatFun> out;
  for (std::size_t i = 0; i < v.n(); ++i) out.emplace_back(v.X[i]);
  auto s = stacked(v.eta);
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline std::vector<Q> av_vector_at(const AVSection& v, std::span<const Q> m) {
  std::vector<Q> out = v.X.evaluate(m);
  auto s = stacked_at(v.eta, m);
  out.insert(out.end(), s.begin(), s.end());
  return out;
}

inline Mat av_frame_matrix(const AVSubbundle& L) {
  std::size_t dim = L.n * (1 + L.k);
  Mat m(dim, L.frame.size(), L.n);
  for (std::size_t a = 0; a < L.frame.size(); ++a) {
    auto v = av_vector(L.frame[a]);
    for (std::size_t i = 0; i < dim; ++i) m(i, a) = v[i];
  }
  return m;
}

inline std::vector<std::vector<Q>> frame_at(const AVSubbundle& L, std::span<const Q> m) {
  std::vector<std::vector<Q>> out;
  for (const auto& v : L.frame) out.push_back(av_vector_at(v, m));
  return out;
}

// Rows (a, j): w = Y ⊕ γ pairs with v_a to η_{a,j}(Y) + γ_j(X_a).
inline std::vector<std::vector<Q>> perp_at(const AVSubbundle& L, std::span<const Q> m) {
  std::size_t n = L.n, k = L.k, dim = n * (1 + k);
  QMat A(L.frame.size() * k, dim);
  for (std::size_t a = 0; a < L.frame.size(); ++a) {
    auto X = L.frame[a].X.evaluate(m);
    auto eta = stacked_at(L.frame[a].eta, m);
    for (std::size_t j = 0; j < k; ++j) {
      std::size_t row = a * k + j;
      for (std::size_t i = 0; i < n; ++i) {
        A(row, i) = eta[j * n + i];
        A(row, n + j * n + i) = X[i];
      }
    }
  }
  if (L.frame.empty()) {
    std::vector<std::vector<Q>> all;
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<Q> e(dim);
      e[i] = 1;
      all.push_back(e);
    }
    return all;
  }
  return nullspace(A);
}

inline std::vector<std::vector<Q>> tangent_basis(std::size_t n, std::size_t k) {
  std::vector<std::vector<Q>> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Q> e(n * (1 + k));
    e[i] = 1;
    out.push_back(e);
  }
  return out;
}

inline std::vector<std::vector<Q>> cotangent_basis(std::size_t n, std::size_t k) {
  std::vector<std::vector<Q>> out;
  for (std::size_t i = 0; i < k * n; ++i) {
    std::vector<Q> e(n * (1 + k));
    e[n + i] = 1;
    out.push_back(e);
  }
  return out;
}

struct AVPointData {
  std::size_t dim_L = 0;
  std::size_t dim_perp = 0;
  std::size_t dim_L_plus_T = 0;
  std::size_t dim_relaxed = 0;  // dim L⊥ ∩ (L + TM)
  std::size_t dim_L_cap_T = 0;
  std::size_t dim_perp_cap_T = 0;
  std::size_t dim_L_cap_Tstar = 0;
};

inline AVPointData av_point_data(const AVSubbundle& L, std::span<const Q> m) {
  std::size_t dim = L.n * (1 + L.k);
  auto F = frame_at(L, m);
  auto perp = perp_at(L, m);
  auto T = tangent_basis(L.n, L.k);
  AVPointData d;
  d.dim_L = span_rank(F, dim);
  d.dim_perp = perp.size();
  auto LT = F;
  LT.insert(LT.end(), T.begin(), T.end());
  d.dim_L_plus_T = span_rank(LT, dim);
  d.dim_relaxed = intersect_spans(perp, LT, dim).size();
  d.dim_L_cap_T = F.empty() ? 0 : intersect_spans(F, T, dim).size();
  d.dim_perp_cap_T = perp.empty() ? 0 : intersect_spans(perp, T, dim).size();
  d.dim_L_cap_Tstar = F.empty() ? 0 : intersect_spans(F, cotangent_basis(L.n, L.k), dim).size();
  return d;
}

inline Report classify(const AVSubbundle& L) {
  Report rep;
  rep.subject = "subbundle of TM + (T*M)^k";
  std::size_t r = L.frame.size();
  timed(rep, [&](Report& out) { out.checks.push_back(rank_check("constant_rank", av_frame_matrix(L), r, L.plan)); });
  timed(rep, [&](Report& out) {
    Check c{"isotropic", Verdict::Pass, "pairing vanishes identically on frame pairs", {}, 0};
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = a; b < r; ++b) {
        auto p = pairing(L.frame[a], L.frame[b]);
        for (std::size_t j = 0; j < p.size(); ++j)
          if (!p[j].is_zero()) {
            c.verdict = Verdict::Fail;
            c.witnesses.push_back("pair (" + std::to_string(a) + ", " + std::to_string(b) + ") component " +
                                  std::to_string(j) + ": " + p[j].to_string());
          }
      }
    out.checks.push_back(std::move(c));
  });
  timed(rep, [&](Report& out) {
    Check lag{"lagrangian", Verdict::Pass, "L equals its orthogonal", {}, 0};
    Check rel{"relaxed_lagrangian", Verdict::Pass, "L equals its orthogonal intersected with L + TM", {}, 0};
    Check lt{"meets_tangent_trivially", Verdict::Pass, "L meets TM only in 0", {}, 0};
    Check pt{"perp_meets_tangent_trivially", Verdict::Pass, "the orthogonal of L meets TM only in 0", {}, 0};
    Check lc{"meets_cotangent_trivially", Verdict::Pass, "L meets (T*M)^k only in 0", {}, 0};
    for (const auto& m : sample_points(plan_for(L.plan, L.n), L.n)) {
      AVPointData d = av_point_data(L, m);
      std::string at = " at " + point_str(m);
      if (d.dim_perp != d.dim_L) {
        lag.verdict = Verdict::Fail;
        lag.witnesses.push_back("dim L = " + std::to_string(d.dim_L) + ", dim perp = " + std::to_string(d.dim_perp) + at);
      }
      if (d.dim_relaxed != d.dim_L) {
        rel.verdict = Verdict::Fail;
        rel.witnesses.push_back("dim L = " + std::to_string(d.dim_L) + ", dim perp cap (L + TM) = " + std::to_string(d.dim_relaxed) + at);
      }
      if (d.dim_L_cap_T) {
        lt.verdict = Verdict::Fail;
        lt.witnesses.push_back("intersection of dimension " + std::to_string(d.dim_L_cap_T) + at);
      }
      if (d.dim_perp_cap_T) {
        pt.verdict = Verdict::Fail;
        pt.witnesses.push_back("intersection of dimension " + std::to_string(d.dim_perp_cap_T) + at);
      }
      if (d.dim_L_cap_Tstar) {
        lc.verdict = Verdict::Fail;
        lc.witnesses.push_back("intersection of dimension " + std::to_string(d.dim_L_cap_Tstar) + at);
      }
    }
    for (auto* c : {&lag, &rel, &lt, &pt, &lc}) out.checks.push_back(std::move(*c));
  });
  timed(rep, [&](Report& out) {
    Check c{"involutive", Verdict::Pass, "brackets of frame elements lie in L", {}, 0};
    Mat fm = av_frame_matrix(L);
    std::vector<Poly> dens;
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b) {
        AVSection br = dorfman(L.frame[a], L.frame[b]);
        auto sol = solve_membership(fm, av_vector(br));
        if (!sol) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("[[" + std::to_string(a) + ", " + std::to_string(b) + "]] = " + br.to_string() + " is not in L");
        } else {
          for (const auto& x : *sol)
            if (!x.den().is_constant()) dens.push_back(x.den());
        }
      }
    if (c.verdict == Verdict::Pass) {
      auto bad = detail::vanishing_points(dens, L.plan, L.n);
      if (!bad.empty()) {
        c.verdict = Verdict::Warn;
        for (const auto& p : bad) c.witnesses.push_back("denominator zero at " + point_str(p));
      }
    }
    out.checks.push_back(std::move(c));
  });
  return rep;
}

inline AVSubbundle graph(const PolyPoissonStruct& pp, bool verify = true) {
  if (verify) {
    Report r = check_structure(pp);
    if (!r.ok()) throw std::invalid_argument("graph: structure check failed (" + r.first_failure()->name + ")");
  }
  AVSubbundle L{pp.n, pp.k, {}, pp.plan};
  for (std::size_t a = 0; a < pp.rank(); ++a) L.frame.push_back({pp.anchor[a], pp.frame[a]});
  return L;
}

// Graph of a 2-form: X ⊕ i_X ω over a coordinate frame.
inline AVSubbundle form_graph(const KForm& w, const SamplePlan& plan) {
  AVSubbundle L{w.n(), w.k(), {}, plan};
  for (std::size_t i = 0; i < w.n(); ++i) {
    auto X = VectorField::coordinate(w.n(), i);
    L.frame.push_back({X, interior(X, w)});
  }
  return L;
}

inline AVSubbundle tangent_subbundle(std::size_t n, std::size_t k, const SamplePlan& plan) {
  AVSubbundle L{n, k, {}, plan};
  for (std::size_t i = 0; i < n; ++i) L.frame.push_back({VectorField::coordinate(n, i), CoSection(n, 1, k)});
  return L;
}

inline PolyPoissonStruct extract(const AVSubbundle& L) {
  PolyPoissonStruct pp;
  pp.n = L.n;
  pp.k = L.k;
  pp.plan = L.plan;
  for (const auto& v : L.frame) {
    pp.frame.push_back(v.eta);
    pp.anchor.push_back(v.X);
  }
  std::size_t r = L.frame.size();
  Check c = rank_check("cotangent_projection", frame_matrix(pp.frame, L.n, L.k), r, L.plan);
  if (c.verdict != Verdict::Pass) {
    throw std::invalid_argument("extract: projection to (T*M)^k drops rank, so L meets TM (" +
                                (c.witnesses.empty() ? c.detail : c.witnesses.front()) + ")");
  }
  return pp;
}

}  // namespace ppkit
