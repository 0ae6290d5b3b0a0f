#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ppkit/exactalg/matrix.hpp"

namespace ppkit {

// Structure constants [e_a, e_b] = Σ_l c[a][b][l] e_l.
struct LieAlgebra {
  std::size_t dim = 0;
  std::vector<std::vector<std::vector<Q>>> c;
  std::string name;

  LieAlgebra() = default;
  explicit LieAlgebra(std::size_t d, std::string nm = {})
      : dim(d), c(d, std::vector<std::vector<Q>>(d, std::vector<Q>(d))), name(std::move(nm)) {}

  void set(std::size_t a, std::size_t b, std::size_t l, const Q& v) {
    c[a][b][l] = v;
    c[b][a][l] = -v;
  }

  std::vector<Q> bracket(const std::vector<Q>& u, const std::vector<Q>& v) const {
    std::vector<Q> out(dim);
    for (std::size_t a = 0; a < dim; ++a) {
      if (u[a] == 0) continue;
      for (std::size_t b = 0; b < dim; ++b) {
        if (v[b] == 0) continue;
        for (std::size_t l = 0; l < dim; ++l) out[l] += u[a] * v[b] * c[a][b][l];
      }
    }
    return out;
  }

  bool antisymmetric() const {
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < dim; ++b)
        for (std::size_t l = 0; l < dim; ++l)
          if (c[a][b][l] != -c[b][a][l]) return false;
    return true;
  }

  // Brute force over basis triples.
  bool jacobi() const {
    for (std::size_t a = 0; a < dim; ++a) {
      for (std::size_t b = 0; b < dim; ++b) {
        for (std::size_t d = 0; d < dim; ++d) {
          for (std::size_t f = 0; f < dim; ++f) {
            Q s = 0;
            for (std::size_t e = 0; e < dim; ++e) {
              s += c[b][d][e] * c[a][e][f] + c[d][a][e] * c[b][e][f] + c[a][b][e] * c[d][e][f];
            }
            if (s != 0) return false;
          }
        }
      }
    }
    return true;
  }

  // Matrix of ad_u: (ad_u)[l][b] = coefficient of e_l in [u, e_b].
  std::vector<std::vector<Q>> ad(const std::vector<Q>& u) const {
    std::vector<std::vector<Q>> m(dim, std::vector<Q>(dim));
    for (std::size_t b = 0; b < dim; ++b) {
      std::vector<Q> eb(dim);
      eb[b] = 1;
      auto col = bracket(u, eb);
      for (std::size_t l = 0; l < dim; ++l) m[l][b] = col[l];
    }
    return m;
  }

  // Nilpotency class (length of the lower central series), 0 if not nilpotent.
  std::size_t nilpotency_class() const {
    std::vector<std::vector<Q>> span;
    for (std::size_t a = 0; a < dim; ++a) {
      std::vector<Q> e(dim);
      e[a] = 1;
      span.push_back(e);
    }
    for (std::size_t step = 1; step <= dim + 1; ++step) {
      std::vector<std::vector<Q>> next;
      for (std::size_t a = 0; a < dim; ++a) {
        std::vector<Q> e(dim);
        e[a] = 1;
        for (const auto& v : span) {
          auto w = bracket(e, v);
          bool nz = false;
          for (const auto& x : w) nz = nz || x != 0;
          if (nz) next.push_back(w);
        }
      }
      if (next.empty()) return step;
      QMat m = QMat::from_rows(next, dim);
      std::size_t rk = rref(m).size();
      span.clear();
      for (std::size_t i = 0; i < rk; ++i) {
        std::vector<Q> row(dim);
        for (std::size_t l = 0; l < dim; ++l) row[l] = m(i, l);
        span.push_back(row);
      }
    }
    return 0;
  }
};

inline LieAlgebra heisenberg() {
  LieAlgebra g(3, "heisenberg");
  g.set(0, 1, 2, 1);
  return g;
}

inline LieAlgebra abelian(std::size_t d) { return LieAlgebra(d, "abelian"); }

// so(3): [e1,e2]=e3 and cyclic; not nilpotent.
inline LieAlgebra so3() {
  LieAlgebra g(3, "so3");
  g.set(0, 1, 2, 1);
  g.set(1, 2, 0, 1);
  g.set(2, 0, 1, 1);
  return g;
}

}  // namespace ppkit
