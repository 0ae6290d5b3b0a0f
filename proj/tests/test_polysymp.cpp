#include <gtest/gtest.h>

#include "ppkit/polysymp/polysymp.hpp"

using namespace ppkit;

namespace {

Poly C(std::size_t n, long c) { return Poly::constant(n, c); }

KForm dxdy(std::size_t n, std::vector<long> mult, std::size_t a = 0, std::size_t b = 1) {
  KForm w(n, 2, mult.size());
  for (std::size_t j = 0; j < mult.size(); ++j) w.add(j, {a, b}, C(n, mult[j]));
  return w;
}

const SamplePlan kPlan{3, 6, 4, {}};

// Independent oracle: ⋂ ker ω_j at p from evaluating each component on basis pairs.
std::size_t joint_kernel_dim(const KForm& w, const Point& p) {
  std::size_t n = w.n();
  std::vector<std::vector<Q>> rows;
  for (std::size_t j = 0; j < w.k(); ++j) {
    for (std::size_t a = 0; a < n; ++a) {
      std::vector<Q> row(n);
      for (std::size_t b = 0; b < n; ++b) {
        std::vector<Q> ea(n), eb(n);
        ea[a] = 1;
        eb[b] = 1;
        row[b] = evaluate_two_form(w, j, p, ea, eb);
      }
      rows.push_back(row);
    }
  }
  return n - span_rank(rows, n);
}

}  // namespace

TEST(FlatMatrix, CanonicalPlane) {
  Mat m = flat_matrix(dxdy(2, {1}));
  ASSERT_EQ(m.rows(), 2u);
  // column 0 = i_{∂x}ω = dy, column 1 = i_{∂y}ω = −dx
  EXPECT_EQ(m(0, 0), RatFun(C(2, 0)));
  EXPECT_EQ(m(1, 0), RatFun(C(2, 1)));
  EXPECT_EQ(m(0, 1), RatFun(C(2, -1)));
  EXPECT_EQ(m(1, 1), RatFun(C(2, 0)));
}

TEST(FlatMatrix, ZeroForm) {
  Mat m = flat_matrix(KForm(3, 2, 2));
  EXPECT_EQ(generic_rank(m), 0u);
}

TEST(FlatMatrix, TwoComponentsStack) {
  Mat m = flat_matrix(dxdy(2, {1, 2}));
  ASSERT_EQ(m.rows(), 4u);
  EXPECT_EQ(m(1, 0), RatFun(C(2, 1)));
  EXPECT_EQ(m(0, 1), RatFun(C(2, -1)));
  EXPECT_EQ(m(3, 0), RatFun(C(2, 2)));
  EXPECT_EQ(m(2, 1), RatFun(C(2, -2)));
}

TEST(IsPolysymplectic, CovelocitiesPass) {
  Report r = is_polysymplectic(covelocities(2, 2), kPlan);
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.verdict_of("closed"), Verdict::Pass);
  EXPECT_EQ(r.verdict_of("nondegenerate"), Verdict::Pass);
}

TEST(IsPolysymplectic, ProportionalComponentsPass) {
  EXPECT_TRUE(is_polysymplectic(dxdy(2, {1, 2}), kPlan).ok());
}

TEST(IsPolysymplectic, SharedKernelFails) {
  Report r = is_polysymplectic(dxdy(4, {1, 1}), kPlan);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.verdict_of("nondegenerate"), Verdict::Fail);
  EXPECT_FALSE(r.find("nondegenerate")->witnesses.empty());
  auto pts = sample_points(kPlan, 4);
  EXPECT_EQ(joint_kernel_dim(dxdy(4, {1, 1}), pts[0]), 2u);
}

TEST(IsPolysymplectic, NonClosedFails) {
  KForm w(3, 2, 1);
  w.add(0, {0, 1}, Poly::variable(3, 2));
  Report r = is_polysymplectic(w, kPlan);
  EXPECT_EQ(r.verdict_of("closed"), Verdict::Fail);
  EXPECT_FALSE(r.find("closed")->witnesses.empty());
}

TEST(IsPolysymplectic, RankDropPointIsFlagged) {
  // x·dx∧dy is closed but degenerates on x = 0, which a dense small-box sample hits.
  KForm w(2, 2, 1);
  w.add(0, {0, 1}, Poly::variable(2, 0));
  Report r = is_polysymplectic(w, SamplePlan{1, 40, 1, {}});
  EXPECT_EQ(r.verdict_of("closed"), Verdict::Pass);
  EXPECT_EQ(r.verdict_of("nondegenerate"), Verdict::Fail);
  EXPECT_NE(r.find("nondegenerate")->witnesses.at(0).find("rank 0 at (0,"), std::string::npos);
}

TEST(IsPolysymplectic, KernelOracleAgreesOnPassingForms) {
  for (const KForm& w : {covelocities(2, 2), covelocities(1, 3), dxdy(2, {1, 2})}) {
    ASSERT_TRUE(is_polysymplectic(w, kPlan).ok());
    for (const auto& p : sample_points(kPlan, w.n())) EXPECT_EQ(joint_kernel_dim(w, p), 0u);
  }
}

TEST(Product, TwoPlanes) {
  std::vector<std::pair<PolySympForm, PolyMap>> f{{dxdy(2, {1}), PolyMap::coordinates(4, {0, 1})},
                                                   {dxdy(2, {1}), PolyMap::coordinates(4, {2, 3})}};
  KForm w = product_polysymplectic(f);
  EXPECT_EQ(w.k(), 2u);
  EXPECT_EQ(w.coeff(0, {0, 1}), C(4, 1));
  EXPECT_EQ(w.coeff(1, {2, 3}), C(4, 1));
  EXPECT_TRUE(is_polysymplectic(w, kPlan).ok());
}

TEST(Product, SingleFactorIdentity) {
  KForm w = covelocities(1, 2);
  EXPECT_EQ(product_polysymplectic({{w, PolyMap::identity(3)}}), w);
}

TEST(Product, BothOntoFirstFactorFails) {
  std::vector<std::pair<PolySympForm, PolyMap>> f{{dxdy(2, {1}), PolyMap::coordinates(4, {0, 1})},
                                                   {dxdy(2, {1}), PolyMap::coordinates(4, {0, 1})}};
  EXPECT_EQ(is_polysymplectic(product_polysymplectic(f), kPlan).verdict_of("nondegenerate"), Verdict::Fail);
}

TEST(Product, DimensionMismatchRejected) {
  std::vector<std::pair<PolySympForm, PolyMap>> f{{dxdy(2, {1}), PolyMap::coordinates(4, {0, 1, 2})}};
  EXPECT_THROW(product_polysymplectic(f), std::invalid_argument);
}

TEST(Covelocities, CanonicalPlane) { EXPECT_EQ(covelocities(1, 1), dxdy(2, {1})); }

TEST(Covelocities, TwoByTwo) {
  KForm w = covelocities(2, 2);
  EXPECT_EQ(w.n(), 6u);
  EXPECT_EQ(w.coeff(0, {0, 2}), C(6, 1));
  EXPECT_EQ(w.coeff(0, {1, 3}), C(6, 1));
  EXPECT_EQ(w.coeff(1, {0, 4}), C(6, 1));
  EXPECT_EQ(w.coeff(1, {1, 5}), C(6, 1));
  EXPECT_TRUE(is_polysymplectic(w, kPlan).ok());
}

TEST(Covelocities, OneByTwoHasTrivialJointKernel) {
  KForm w = covelocities(1, 2);
  EXPECT_EQ(generic_rank(flat_matrix(w)), 3u);
  for (const auto& p : sample_points(kPlan, 3)) EXPECT_EQ(joint_kernel_dim(w, p), 0u);
}

TEST(Covelocities, EqualsProductOfSingleCopies) {
  for (std::size_t nq = 1; nq <= 3; ++nq) {
    for (std::size_t k = 1; k <= 3; ++k) {
      std::size_t n = nq * (1 + k);
      std::vector<std::pair<PolySympForm, PolyMap>> f;
      for (std::size_t j = 0; j < k; ++j) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < nq; ++i) idx.push_back(i);
        for (std::size_t i = 0; i < nq; ++i) idx.push_back(nq * (1 + j) + i);
        f.emplace_back(covelocities(nq, 1), PolyMap::coordinates(n, idx));
      }
      EXPECT_EQ(product_polysymplectic(f), covelocities(nq, k));
    }
  }
}
