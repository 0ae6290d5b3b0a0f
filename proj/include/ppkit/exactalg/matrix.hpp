#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ppkit/exactalg/ratfun.hpp"

namespace ppkit {

// Dense matrix of rationals, used for everything evaluated at a sample point.
struct QMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Q> a;

  QMat() = default;
  QMat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

  Q& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const Q& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static QMat from_columns(const std::vector<std::vector<Q>>& columns, std::size_t rows) {
    QMat m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
      for (std::size_t i = 0; i < rows; ++i) m(i, j) = columns[j][i];
    }
    return m;
  }

  static QMat from_rows(const std::vector<std::vector<Q>>& rs, std::size_t cols) {
    QMat m(rs.size(), cols);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = rs[i][j];
    }
    return m;
  }

  QMat transpose() const {
    QMat t(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  std::vector<Q> column(std::size_t j) const {
    std::vector<Q> c(rows);
    for (std::size_t i = 0; i < rows; ++i) c[i] = (*this)(i, j);
    return c;
  }

  friend bool operator==(const QMat&, const QMat&) = default;
};

// Reduced row echelon form in place; returns the pivot columns.
inline std::vector<std::size_t> rref(QMat& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t j = 0; j < m.cols && r < m.rows; ++j) {
    std::size_t p = r;
    while (p < m.rows && m(p, j) == 0) ++p;
    if (p == m.rows) continue;
    if (p != r) {
      for (std::size_t l = 0; l < m.cols; ++l) std::swap(m(p, l), m(r, l));
    }
    Q inv = 1 / m(r, j);
    for (std::size_t l = j; l < m.cols; ++l) m(r, l) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == r || m(i, j) == 0) continue;
      Q f = m(i, j);
      for (std::size_t l = j; l < m.cols; ++l) m(i, l) -= f * m(r, l);
    }
    pivots.push_back(j);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(QMat m) { return rref(m).size(); }

inline std::vector<std::vector<Q>> nullspace(QMat m) {
  auto pivots = rref(m);
  std::vector<bool> is_pivot(m.cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Q>> basis;
  for (std::size_t f = 0; f < m.cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Q> v(m.cols);
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -m(i, f);
    basis.push_back(std::move(v));
  }
  return basis;
}

// Rank of the span of a list of vectors of equal length.
inline std::size_t span_rank(const std::vector<std::vector<Q>>& vs, std::size_t dim) {
  if (vs.empty()) return 0;
  return rank(QMat::from_rows(vs, dim));
}

// Basis of span(A) ∩ span(B).
inline std::vector<std::vector<Q>> intersect_spans(const std::vector<std::vector<Q>>& A,
                                                   const std::vector<std::vector<Q>>& B,
                                                   std::size_t dim) {
  std::vector<std::vector<Q>> cols = A;
  for (const auto& b : B) {
    std::vector<Q> nb(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) nb[i] = -b[i];
    cols.push_back(std::move(nb));
  }
  if (cols.empty()) return {};
  std::vector<std::vector<Q>> out;
  for (const auto& c : nullspace(QMat::from_columns(cols, dim))) {
    std::vector<Q> v(dim);
    for (std::size_t a = 0; a < A.size(); ++a) {
      if (c[a] == 0) continue;
      for (std::size_t i = 0; i < dim; ++i) v[i] += c[a] * A[a][i];
    }
    out.push_back(std::move(v));
  }
  std::vector<std::vector<Q>> basis;
  for (auto& v : out) {
    basis.push_back(v);
    if (span_rank(basis, dim) < basis.size()) basis.pop_back();
  }
  return basis;
}

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, std::size_t nvars)
      : rows_(rows), cols_(cols), nvars_(nvars), e_(rows * cols, RatFun(nvars)) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nvars() const { return nvars_; }

  RatFun& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
  const RatFun& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

  std::optional<QMat> evaluate(std::span<const Q> point) const {
    QMat m(rows_, cols_);
    for (std::size_t i = 0; i < e_.size(); ++i) {
      auto v = e_[i].evaluate(point);
      if (!v) return std::nullopt;
      m.a[i] = *v;
    }
    return m;
  }

  std::vector<Poly> denominators() const {
    std::vector<Poly> out;
    for (const auto& x : e_) {
      if (!x.den().is_constant()) out.push_back(x.den());
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t nvars_ = 0;
  std::vector<RatFun> e_;
};

namespace detail {

struct Echelon {
  std::vector<std::vector<Poly>> a;
  std::vector<std::size_t> pivots;
};

// Clears denominators row by row into a polynomial matrix.
inline std::vector<std::vector<Poly>> clear_rows(const Mat& m, const std::vector<RatFun>* extra) {
  std::vector<std::vector<Poly>> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Poly l = Poly::constant(m.nvars(), 1);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!m(i, j).den().is_constant()) l = lcm(l, m(i, j).den());
    }
    if (extra && !(*extra)[i].den().is_constant()) l = lcm(l, (*extra)[i].den());
    auto scaled = [&](const RatFun& f) {
      if (f.is_zero()) return Poly(m.nvars());
      return *(f.num() * l).divide_exact(f.den());
    };
    for (std::size_t j = 0; j < m.cols(); ++j) out[i].push_back(scaled(m(i, j)));
    if (extra) out[i].push_back(scaled((*extra)[i]));
  }
  return out;
}

// Fraction-free elimination; pivots are searched only among the first `pivot_cols` columns.
inline Echelon bareiss(std::vector<std::vector<Poly>> a, std::size_t cols, std::size_t pivot_cols,
                       std::size_t nvars) {
  Echelon out;
  std::size_t rows = a.size();
  Poly prev = Poly::constant(nvars, 1);
  std::size_t r = 0;
  for (std::size_t j = 0; j < pivot_cols && r < rows; ++j) {
    std::size_t best = rows;
    for (std::size_t i = r; i < rows; ++i) {
      if (a[i][j].is_zero()) continue;
      if (best == rows || a[i][j].size() < a[best][j].size()) best = i;
    }
    if (best == rows) continue;
    std::swap(a[r], a[best]);
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t l = j + 1; l < cols; ++l) {
        Poly t = a[r][j] * a[i][l] - a[i][j] * a[r][l];
        auto q = t.divide_exact(prev);
        if (!q) throw std::logic_error("bareiss: inexact division");
        a[i][l] = std::move(*q);
      }
      a[i][j] = Poly(nvars);
    }
    prev = a[r][j];
    out.pivots.push_back(j);
    ++r;
  }
  out.a = std::move(a);
  return out;
}

}  // namespace detail

inline std::size_t generic_rank(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  auto a = detail::clear_rows(m, nullptr);
  return detail::bareiss(std::move(a), m.cols(), m.cols(), m.nvars()).pivots.size();
}

inline std::optional<std::vector<RatFun>> solve_membership(const Mat& m, const std::vector<RatFun>& v) {
  if (v.size() != m.rows()) throw std::invalid_argument("solve_membership: length mismatch");
  std::size_t c = m.cols();
  std::size_t nv = m.nvars();
  auto ech = detail::bareiss(detail::clear_rows(m, &v), c + 1, c, nv);
  const auto& a = ech.a;
  std::size_t rk = ech.pivots.size();
  for (std::size_t i = rk; i < m.rows(); ++i) {
    if (!a[i][c].is_zero()) return std::nullopt;
  }
  std::vector<RatFun> x(c, RatFun(nv));
  for (std::size_t ii = rk; ii-- > 0;) {
    std::size_t p = ech.pivots[ii];
    RatFun acc(a[ii][c]);
    for (std::size_t jj = ii + 1; jj < rk; ++jj) {
      std::size_t q = ech.pivots[jj];
      if (a[ii][q].is_zero() || x[q].is_zero()) continue;
      acc -= RatFun(a[ii][q]) * x[q];
    }
    x[p] = acc / RatFun(a[ii][p]);
  }
  return x;
}

// Polynomial vectors spanning the kernel over the fraction field, one per free column.
inline std::vector<std::vector<Poly>> kernel_basis(const Mat& m) {
  std::size_t c = m.cols();
  std::size_t nv = m.nvars();
  std::vector<std::vector<Poly>> out;
  if (c == 0) return out;
  if (m.rows() == 0) {
    for (std::size_t f = 0; f < c; ++f) {
      std::vector<Poly> v(c, Poly(nv));
      v[f] = Poly::constant(nv, 1);
      out.push_back(std::move(v));
    }
    return out;
  }
  auto ech = detail::bareiss(detail::clear_rows(m, nullptr), c, c, nv);
  const auto& a = ech.a;
  std::size_t rk = ech.pivots.size();
  std::vector<bool> is_pivot(c, false);
  for (auto p : ech.pivots) is_pivot[p] = true;
  for (std::size_t f = 0; f < c; ++f) {
    if (is_pivot[f]) continue;
    std::vector<RatFun> x(c, RatFun(nv));
    x[f] = RatFun::constant(nv, 1);
    for (std::size_t ii = rk; ii-- > 0;) {
      std::size_t p = ech.pivots[ii];
      RatFun acc = -(RatFun(a[ii][f]));
      for (std::size_t jj = ii + 1; jj < rk; ++jj) {
        std::size_t q = ech.pivots[jj];
        if (a[ii][q].is_zero() || x[q].is_zero()) continue;
        acc -= RatFun(a[ii][q]) * x[q];
      }
      x[p] = acc / RatFun(a[ii][p]);
    }
    Poly l = Poly::constant(nv, 1);
    for (const auto& e : x) {
      if (!e.den().is_constant()) l = lcm(l, e.den());
    }
    std::vector<Poly> v;
    for (const auto& e : x) {
      v.push_back(e.is_zero() ? Poly(nv) : *(e.num() * l).divide_exact(e.den()));
    }
    out.push_back(std::move(v));
  }
  return out;
}

// Product of a matrix with a vector of rational functions.
inline std::vector<RatFun> mat_vec(const Mat& m, const std::vector<RatFun>& x) {
  std::vector<RatFun> out(m.rows(), RatFun(m.nvars()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).is_zero() || x[j].is_zero()) continue;
      out[i] += m(i, j) * x[j];
    }
  }
  return out;
}

}  // namespace ppkit
