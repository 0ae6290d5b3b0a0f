#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ppkit/cartan/maps.hpp"
#include "ppkit/exactalg/rank_check.hpp"

namespace ppkit {

using PolySympForm = KForm;

inline std::vector<std::string> default_names(std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < n; ++i) v.push_back("x" + std::to_string(i));
  return v;
}

// Column i holds the stacked k-tuple i_{∂_i}ω; row j·n + l is the dx_l coefficient of slot j.
inline Mat flat_matrix(const PolySympForm& w) {
  if (w.r() != 2) throw std::invalid_argument("flat_matrix: expected a 2-form");
  std::size_t n = w.n(), k = w.k();
  Mat m(k * n, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    KForm col = interior(VectorField::coordinate(n, i), w);
    for (std::size_t j = 0; j < k; ++j) {
      for (const auto& [idx, f] : col.component(j)) m(j * n + idx[0], i) = RatFun(f);
    }
  }
  return m;
}

inline Report is_polysymplectic(const PolySympForm& w, const SamplePlan& plan,
                                const std::vector<std::string>& names = {}) {
  Report r;
  r.subject = "poly-symplectic form";
  timed(r, [&](Report& rep) {
    KForm dw = ext_d(w);
    Check& c = rep.add("closed", dw.is_zero() ? Verdict::Pass : Verdict::Fail);
    if (dw.is_zero()) {
      c.detail = "d(omega) = 0";
    } else {
      c.detail = "d(omega) has a nonzero component";
      c.witnesses.push_back("d(omega) = " + dw.to_string(names));
    }
  });
  timed(r, [&](Report& rep) {
    Check c = rank_check("nondegenerate", flat_matrix(w), w.n(), plan);
    c.detail = "joint kernel of the components: " + c.detail;
    rep.checks.push_back(std::move(c));
  });
  return r;
}

// ω = (p_1*ω_1, ..., p_l*ω_l), components concatenated.
inline PolySympForm product_polysymplectic(const std::vector<std::pair<PolySympForm, PolyMap>>& factors) {
  if (factors.empty()) throw std::invalid_argument("product_polysymplectic: no factors");
  std::size_t total = factors.front().second.domain_dim();
  std::size_t k = 0;
  for (const auto& [w, p] : factors) {
    if (p.domain_dim() != total) throw std::invalid_argument("product_polysymplectic: projections disagree on the total space");
    if (p.codomain_dim() != w.n()) throw std::invalid_argument("product_polysymplectic: projection does not land in the factor");
    k += w.k();
  }
  KForm out(total, 2, k);
  std::size_t slot = 0;
  for (const auto& [w, p] : factors) {
    KForm pw = pullback(p, w);
    for (std::size_t j = 0; j < w.k(); ++j, ++slot) {
      for (const auto& [idx, f] : pw.component(j)) out.add(slot, idx, f);
    }
  }
  return out;
}

// Coordinates (q_1..q_nq, p^(1)_1..p^(1)_nq, ..., p^(k)_1..p^(k)_nq).
inline PolySympForm covelocities(std::size_t nq, std::size_t k) {
  if (nq == 0 || k == 0) throw std::invalid_argument("covelocities: nq and k must be positive");
  std::size_t n = nq * (1 + k);
  KForm w(n, 2, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < nq; ++i) w.add(j, {i, nq * (1 + j) + i}, Poly::constant(n, 1));
  }
  return w;
}

inline std::vector<std::string> covelocity_names(std::size_t nq, std::size_t k) {
  std::vector<std::string> v;
  for (std::size_t i = 0; i < nq; ++i) v.push_back(nq == 1 ? "q" : "q" + std::to_string(i + 1));
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < nq; ++i) {
      std::string s = "p";
      if (k > 1) s += std::to_string(j + 1);
      if (k > 1 && nq > 1) s += "_";
      if (nq > 1) s += std::to_string(i + 1);
      v.push_back(s);
    }
  }
  return v;
}

}  // namespace ppkit
