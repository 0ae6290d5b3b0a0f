#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/polypoisson/structure.hpp"

namespace ppkit {

struct Distribution {
  std::size_t n = 0;
  std::vector<VectorField> gens;
  SamplePlan plan;
};

struct LeafFormAtPoint {
  Point point;
  std::size_t p = 0;
  std::vector<std::vector<Q>> basis;
  // values[j][a][b] = ω_j(basis[a], basis[b])
  std::vector<std::vector<std::vector<Q>>> values;
};

struct PointwiseStructure {
  Point point;
  std::size_t p = 0;
  std::size_t dim = 0;
  std::vector<std::vector<Q>> span;    // elements of S_m, stacked j·n + i
  std::vector<std::vector<Q>> anchor;  // P_m of each span element
};

struct Reconstruction {
  Report report;
  std::vector<PointwiseStructure> points;
  std::optional<PolyPoissonStruct> framed;
};

inline Distribution distribution(const PolyPoissonStruct& pp) { return Distribution{pp.n, pp.anchor, pp.plan}; }

inline Mat generator_matrix(const Distribution& D) {
  Mat m(D.n, D.gens.size(), D.n);
  for (std::size_t a = 0; a < D.gens.size(); ++a)
    for (std::size_t i = 0; i < D.n; ++i) m(i, a) = RatFun(D.gens[a][i]);
  return m;
}

inline std::size_t generic_dimension(const Distribution& D) {
  return D.gens.empty() ? 0 : generic_rank(generator_matrix(D));
}

// Independent generator values at m (pivot columns of the evaluated generator matrix).
inline std::vector<std::vector<Q>> basis_at(const Distribution& D, std::span<const Q> m, std::vector<std::size_t>* which = nullptr) {
  std::vector<std::vector<Q>> vals;
  for (const auto& X : D.gens) vals.push_back(X.evaluate(m));
  if (vals.empty()) return {};
  QMat g = QMat::from_columns(vals, D.n);
  auto piv = rref(g);
  std::vector<std::vector<Q>> out;
  for (auto c : piv) out.push_back(vals[c]);
  if (which) *which = piv;
  return out;
}

inline Check regularity_check(const Distribution& D) {
  std::size_t p = generic_dimension(D);
  Check c{"regular", Verdict::Pass, "generic rank " + std::to_string(p), {}, 0};
  for (const auto& m : sample_points(plan_for(D.plan, D.n), D.n)) {
    std::size_t r = basis_at(D, m).size();
    if (r != p) {
      c.verdict = Verdict::Fail;
      c.witnesses.push_back("rank " + std::to_string(r) + " at " + point_str(m));
    }
  }
  return c;
}

inline Report distribution_report(const Distribution& D) {
  Report r;
  r.subject = "characteristic distribution";
  timed(r, [&](Report& rep) { rep.checks.push_back(regularity_check(D)); });
  return r;
}

// Value of an r-form component on r vectors: Σ_idx f(m)·det[v_s(idx_t)].
inline Q evaluate_form(const KForm& w, std::size_t j, std::span<const Q> m, const std::vector<std::vector<Q>>& vs) {
  std::size_t r = w.r();
  Q acc = 0;
  for (const auto& [idx, f] : w.component(j)) {
    QMat sub(r, r);
    for (std::size_t s = 0; s < r; ++s)
      for (std::size_t t = 0; t < r; ++t) sub(s, t) = vs[s][idx[t]];
    // determinant by elimination
    Q det = 1;
    for (std::size_t col = 0; col < r; ++col) {
      std::size_t piv = col;
      while (piv < r && sub(piv, col) == 0) ++piv;
      if (piv == r) {
        det = 0;
        break;
      }
      if (piv != col) {
        for (std::size_t t = 0; t < r; ++t) std::swap(sub(piv, t), sub(col, t));
        det = -det;
      }
      det *= sub(col, col);
      for (std::size_t row = col + 1; row < r; ++row) {
        Q fct = sub(row, col) / sub(col, col);
        if (fct == 0) continue;
        for (std::size_t t = col; t < r; ++t) sub(row, t) -= fct * sub(col, t);
      }
    }
    if (det != 0) acc += f.evaluate(m) * det;
  }
  return acc;
}

inline Q pair_one_form(std::span<const Q> stacked_form, std::size_t j, std::size_t n, std::span<const Q> v) {
  Q s = 0;
  for (std::size_t i = 0; i < n; ++i) s += stacked_form[j * n + i] * v[i];
  return s;
}

inline std::size_t joint_kernel_dim(const LeafFormAtPoint& lf) {
  std::vector<std::vector<Q>> rows;
  for (const auto& mat : lf.values)
    for (const auto& row : mat) rows.push_back(row);
  return lf.p - span_rank(rows, lf.p);
}

inline Check leaf_form_check(const LeafFormAtPoint& lf) {
  Check c{"leaf_form", Verdict::Pass, "antisymmetric with trivial joint kernel at " + point_str(lf.point), {}, 0};
  for (std::size_t j = 0; j < lf.values.size(); ++j)
    for (std::size_t a = 0; a < lf.p; ++a)
      for (std::size_t b = 0; b < lf.p; ++b)
        if (lf.values[j][a][b] != -lf.values[j][b][a]) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("component " + std::to_string(j) + " not antisymmetric at (" + std::to_string(a) + ", " +
                                std::to_string(b) + ")");
        }
  if (lf.p > 0 && joint_kernel_dim(lf) != 0) {
    c.verdict = Verdict::Fail;
    c.witnesses.push_back("joint kernel of dimension " + std::to_string(joint_kernel_dim(lf)));
  }
  return c;
}

// Leaf form of a poly-Poisson structure: ω(P(σ_a), P(σ_b)) = σ_a(P(σ_b)).
inline LeafFormAtPoint leafwise_form_at(const PolyPoissonStruct& pp, const Point& m) {
  Distribution D = distribution(pp);
  std::size_t generic = generic_dimension(D);
  std::vector<std::size_t> which;
  auto basis = basis_at(D, m, &which);
  if (basis.size() != generic) {
    throw std::domain_error("leafwise_form_at: anchor rank " + std::to_string(basis.size()) + " below generic rank " +
                            std::to_string(generic) + " at " + point_str(m));
  }
  std::size_t n = pp.n, k = pp.k, p = basis.size();
  auto values_for = [&](const std::vector<std::vector<Q>>& pre) {
    std::vector<std::vector<std::vector<Q>>> v(k, std::vector<std::vector<Q>>(p, std::vector<Q>(p)));
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) v[j][a][b] = pair_one_form(pre[a], j, n, basis[b]);
    return v;
  };
  std::vector<std::vector<Q>> pre;
  for (auto a : which) pre.push_back(stacked_at(pp.frame[a], m));
  LeafFormAtPoint lf{m, p, basis, values_for(pre)};

  // A second preimage: shift each σ_a by the kernel of P at m; the leaf form must not change.
  std::vector<std::vector<Q>> anchors;
  for (const auto& X : pp.anchor) anchors.push_back(X.evaluate(m));
  if (!anchors.empty()) {
    auto ker = nullspace(QMat::from_columns(anchors, n));
    if (!ker.empty()) {
      auto shifted = pre;
      for (std::size_t a = 0; a < p; ++a) {
        const auto& kv = ker[a % ker.size()];
        for (std::size_t e = 0; e < pp.rank(); ++e) {
          if (kv[e] == 0) continue;
          auto se = stacked_at(pp.frame[e], m);
          for (std::size_t i = 0; i < se.size(); ++i) shifted[a][i] += kv[e] * se[i];
        }
      }
      if (values_for(shifted) != lf.values) throw std::logic_error("leafwise_form_at: leaf form depends on the preimage");
    }
  }
  return lf;
}

// S_m and P_m from a leaf basis and leaf form values.
inline PointwiseStructure reconstruct_at(std::size_t n, std::size_t k, const Point& m,
                                         const std::vector<std::vector<Q>>& basis,
                                         const std::vector<std::vector<std::vector<Q>>>& values) {
  std::size_t p = basis.size();
  // unknowns (η ∈ Q^{kn}, λ ∈ Q^p); rows: η_j(d_b) − Σ_a λ_a ω_j(d_a, d_b) = 0
  QMat sys(k * p, k * n + p);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t b = 0; b < p; ++b) {
      std::size_t row = j * p + b;
      for (std::size_t i = 0; i < n; ++i) sys(row, j * n + i) = basis[b][i];
      for (std::size_t a = 0; a < p; ++a) sys(row, k * n + a) = -values[j][a][b];
    }
  PointwiseStructure out{m, p, 0, {}, {}};
  for (const auto& z : nullspace(sys)) {
    std::vector<Q> eta(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(k * n));
    std::vector<Q> X(n);
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t i = 0; i < n; ++i) X[i] += z[k * n + a] * basis[a][i];
    out.span.push_back(std::move(eta));
    out.anchor.push_back(std::move(X));
  }
  out.dim = span_rank(out.span, k * n);
  if (out.dim != out.span.size()) throw std::domain_error("reconstruct_at: leaf form is degenerate, P is not well defined");
  return out;
}

inline PointwiseStructure reconstruct_at(std::size_t n, std::size_t k, const LeafFormAtPoint& lf) {
  return reconstruct_at(n, k, lf.point, lf.basis, lf.values);
}

// Framed mode: S spanned by i_{X_a}ω (anchor X_a) and each annihilator form placed in each slot (anchor 0).
inline PolyPoissonStruct framed_structure(const Distribution& D, const KForm& w, const std::vector<KForm>& annihilator) {
  PolyPoissonStruct pp;
  pp.n = D.n;
  pp.k = w.k();
  pp.plan = D.plan;
  for (const auto& X : D.gens) {
    pp.frame.push_back(interior(X, w));
    pp.anchor.push_back(X);
  }
  for (std::size_t j = 0; j < w.k(); ++j) {
    for (const auto& a : annihilator) {
      CoSection s(D.n, 1, w.k());
      for (const auto& [idx, f] : a.component(0)) s.add(j, idx, f);
      pp.frame.push_back(s);
      pp.anchor.emplace_back(D.n);
    }
  }
  return pp;
}

inline Reconstruction structure_from_foliation(const Distribution& D, const KForm& w,
                                               const std::optional<std::vector<KForm>>& annihilator = std::nullopt) {
  if (w.r() != 2 || w.n() != D.n) throw std::invalid_argument("structure_from_foliation: expected a 2-form on the base");
  Reconstruction out;
  out.report.subject = "structure from foliation";
  std::size_t n = D.n, k = w.k();
  std::size_t p = generic_dimension(D);
  auto pts = sample_points(plan_for(D.plan, n), n);
  timed(out.report, [&](Report& r) { r.checks.push_back(regularity_check(D)); });
  timed(out.report, [&](Report& r) {
    Check leaf{"leafwise_nondegenerate", Verdict::Pass, "restriction of omega to D has trivial joint kernel", {}, 0};
    Check closed{"closed_on_leaves", Verdict::Pass, "d(omega) vanishes on triples of D", {}, 0};
    Check dimc{"dimension", Verdict::Pass, "dim S_m = k(n - p) + p = " + std::to_string(k * (n - p) + p), {}, 0};
    KForm dw = ext_d(w);
    for (const auto& m : pts) {
      auto basis = basis_at(D, m);
      if (basis.size() != p) continue;
      LeafFormAtPoint lf{m, p, basis, std::vector<std::vector<std::vector<Q>>>(k, std::vector<std::vector<Q>>(p, std::vector<Q>(p)))};
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t a = 0; a < p; ++a)
          for (std::size_t b = 0; b < p; ++b) lf.values[j][a][b] = evaluate_two_form(w, j, m, basis[a], basis[b]);
      if (p > 0 && joint_kernel_dim(lf) != 0) {
        leaf.verdict = Verdict::Fail;
        leaf.witnesses.push_back("joint kernel of dimension " + std::to_string(joint_kernel_dim(lf)) + " at " + point_str(m));
        continue;
      }
      for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a + 1; b < p; ++b)
          for (std::size_t c = b + 1; c < p; ++c)
            for (std::size_t j = 0; j < k; ++j)
              if (evaluate_form(dw, j, m, {basis[a], basis[b], basis[c]}) != 0) {
                closed.verdict = Verdict::Fail;
                closed.witnesses.push_back("component " + std::to_string(j) + " at " + point_str(m));
              }
      PointwiseStructure ps = reconstruct_at(n, k, m, basis, lf.values);
      if (ps.dim != k * (n - p) + p) {
        dimc.verdict = Verdict::Fail;
        dimc.witnesses.push_back("dimension " + std::to_string(ps.dim) + " at " + point_str(m));
      }
      out.points.push_back(std::move(ps));
    }
    dimc.detail += "; verified at " + std::to_string(out.points.size()) + " sample points";
    r.checks.push_back(std::move(leaf));
    r.checks.push_back(std::move(closed));
    r.checks.push_back(std::move(dimc));
  });
  if (annihilator) {
    out.framed = framed_structure(D, w, *annihilator);
    timed(out.report, [&](Report& r) {
      Check c = rank_check("framed_rank", frame_matrix(out.framed->frame, n, k), k * (n - p) + p, D.plan);
      r.checks.push_back(std::move(c));
    });
    out.report.absorb(check_structure(*out.framed), "framed");
  }
  return out;
}

// Pointwise comparison of a structure against a reconstruction at the same points.
inline Check same_span_check(const PolyPoissonStruct& pp, const std::vector<PointwiseStructure>& pts) {
  Check c{"same_span", Verdict::Pass, "structure span equals the reconstructed S_m", {}, 0};
  std::size_t dim = pp.k * pp.n;
  for (const auto& ps : pts) {
    std::vector<std::vector<Q>> mine;
    for (const auto& s : pp.frame) mine.push_back(stacked_at(s, ps.point));
    auto both = mine;
    both.insert(both.end(), ps.span.begin(), ps.span.end());
    std::size_t r1 = span_rank(mine, dim), r2 = ps.dim, r12 = span_rank(both, dim);
    if (!(r1 == r2 && r12 == r1)) {
      c.verdict = Verdict::Fail;
      c.witnesses.push_back("ranks " + std::to_string(r1) + ", " + std::to_string(r2) + ", joint " + std::to_string(r12) +
                            " at " + point_str(ps.point));
    }
  }
  return c;
}

}  // namespace ppkit
