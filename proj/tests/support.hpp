#pragma once

#include <random>
#include <vector>

#include "ppkit/cartan/forms.hpp"

namespace ppkit::testkit {

class RandomPolys {
 public:
  explicit RandomPolys(std::uint64_t seed) : gen_(seed) {}

  long integer(long lo, long hi) { return lo + static_cast<long>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }

  Poly poly(std::size_t nvars, unsigned max_degree, std::size_t max_terms) {
    Poly p(nvars);
    std::size_t terms = static_cast<std::size_t>(integer(0, static_cast<long>(max_terms)));
    for (std::size_t t = 0; t < terms; ++t) {
      Poly::Exponent e(nvars, 0);
      unsigned budget = static_cast<unsigned>(integer(0, max_degree));
      for (unsigned b = 0; b < budget; ++b) ++e[static_cast<std::size_t>(integer(0, static_cast<long>(nvars) - 1))];
      p += Poly::monomial(e, Q(integer(-5, 5), integer(1, 3)));
    }
    return p;
  }

  Poly nonzero_poly(std::size_t nvars, unsigned max_degree, std::size_t max_terms) {
    for (;;) {
      Poly p = poly(nvars, max_degree, max_terms);
      if (!p.is_zero()) return p;
    }
  }

  KForm form(std::size_t n, std::size_t r, std::size_t k, unsigned max_degree) {
    KForm w(n, r, k);
    for (std::size_t j = 0; j < k; ++j) {
      for (int t = 0; t < 3; ++t) {
        KForm::Index idx;
        for (std::size_t a = 0; a < r; ++a) idx.push_back(static_cast<std::size_t>(integer(0, static_cast<long>(n) - 1)));
        w.add(j, idx, poly(n, max_degree, 3));
      }
    }
    return w;
  }

  VectorField field(std::size_t n, unsigned max_degree) {
    std::vector<Poly> c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(poly(n, max_degree, 2));
    return VectorField(std::move(c));
  }

  std::vector<Q> point(std::size_t n) {
    std::vector<Q> p;
    for (std::size_t i = 0; i < n; ++i) p.emplace_back(integer(-7, 7), integer(1, 4));
    for (auto& q : p) q.canonicalize();
    return p;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ppkit::testkit
