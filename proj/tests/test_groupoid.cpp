#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "ppkit/groupoid/models.hpp"

using namespace ppkit;
using namespace ppkit::fixtures;

namespace {

KForm proportional_plane_form() {
  KForm w(2, 2, 2);
  w.add(0, {0, 1}, C(2, 1));
  w.add(1, {0, 1}, C(2, 2));
  return w;
}

std::vector<GroupoidModel> all_models() {
  return {build_pair(proportional_plane_form(), kPlan), build_covelocity(2, 2, kPlan), build_covelocity(1, 2, kPlan),
          build_coadjoint(heisenberg(), 2, kPlan), build_pair(covelocities(1, 2), kPlan)};
}

std::string failures(const Report& r) {
  std::string s;
  for (const auto& c : r.checks)
    if (c.verdict != Verdict::Pass) s += c.name + (c.witnesses.empty() ? "" : " [" + c.witnesses.front() + "]") + "; ";
  return s;
}

// Heisenberg group as unipotent 3x3 matrices, independent of the exponential-coordinate code.
using M3 = std::array<std::array<Q, 3>, 3>;

M3 mul(const M3& a, const M3& b) {
  M3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int l = 0; l < 3; ++l) c[i][j] += a[i][l] * b[l][j];
  return c;
}

M3 algebra(const Q& x, const Q& y, const Q& z) {
  M3 m{};
  m[0][1] = x;
  m[1][2] = y;
  m[0][2] = z;
  return m;
}

M3 group_exp(const Q& x, const Q& y, const Q& z) {
  M3 n = algebra(x, y, z), n2 = mul(n, n), g{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[i][j] = (i == j ? Q(1) : Q(0)) + n[i][j] + n2[i][j] / 2;
  return g;
}

std::array<Q, 3> group_log(const M3& g) {
  M3 m = g;
  for (int i = 0; i < 3; ++i) m[i][i] -= 1;
  M3 m2 = mul(m, m);
  return {m[0][1] - m2[0][1] / 2, m[1][2] - m2[1][2] / 2, m[0][2] - m2[0][2] / 2};
}

M3 group_inv(const M3& g) {
  auto X = group_log(g);
  return group_exp(-X[0], -X[1], -X[2]);
}

// (Ad*_g ζ)(e_b) = ζ(g⁻¹ e_b g)
std::array<Q, 3> coadjoint_oracle(const std::array<Q, 3>& X, const std::array<Q, 3>& zeta) {
  M3 g = group_exp(X[0], X[1], X[2]), gi = group_inv(g);
  std::array<Q, 3> out{};
  for (int b = 0; b < 3; ++b) {
    M3 e = algebra(b == 0, b == 1, b == 2);
    M3 v = mul(mul(gi, e), g);
    out[b] = zeta[0] * v[0][1] + zeta[1] * v[1][2] + zeta[2] * v[0][2];
  }
  return out;
}

}  // namespace

TEST(Axioms, BuildersPass) {
  for (const auto& M : all_models()) {
    Report r = check_groupoid_axioms(M.chart);
    EXPECT_TRUE(r.ok()) << M.kind << ": " << failures(r);
    EXPECT_EQ(r.verdict_of("unit_and_inverse_laws"), Verdict::Pass) << M.kind;
  }
}

TEST(Axioms, SignFlippedMultiplicationFails) {
  auto M = build_pair(proportional_plane_form(), kPlan);
  auto comps = M.chart.m.components();
  comps[0] = -comps[0];
  M.chart.m = PolyMap(M.chart.P, comps);
  Report r = check_groupoid_axioms(M.chart);
  EXPECT_EQ(r.verdict_of("structure_maps"), Verdict::Fail);
  ASSERT_FALSE(r.checks.front().witnesses.empty());
  EXPECT_NE(r.checks.front().witnesses.front().find("t o m = t o pr1"), std::string::npos);
}

TEST(Axioms, BrokenUnitIsCaught) {
  auto M = build_covelocity(1, 2, kPlan);
  M.chart.eps = PolyMap(1, {V(1, 0), C(1, 1), C(1, 0)});
  Report r = check_groupoid_axioms(M.chart);
  EXPECT_EQ(r.verdict_of("structure_maps"), Verdict::Pass);
  EXPECT_EQ(r.verdict_of("unit_and_inverse_laws"), Verdict::Fail);
}

TEST(Multiplicative, PairGroupoidDifferenceForm) {
  auto M = build_pair(proportional_plane_form(), kPlan);
  EXPECT_TRUE(check_multiplicative(M.chart, M.omega).ok());
}

TEST(Multiplicative, PairGroupoidSumFormFails) {
  auto M = build_pair(proportional_plane_form(), kPlan);
  KForm w = proportional_plane_form();
  KForm sum = pullback(M.chart.t, w) + pullback(M.chart.s, w);
  Report r = check_multiplicative(M.chart, sum);
  EXPECT_EQ(r.verdict_of("multiplicative"), Verdict::Fail);
  // residual is −2 ω pulled back from the middle point y
  KForm expected = Q(-2) * pullback(M.chart.s.after(M.chart.pr1), w);
  EXPECT_EQ(pullback(M.chart.m, sum) - pullback(M.chart.pr1, sum) - pullback(M.chart.pr2, sum), expected);
}

TEST(Multiplicative, CovelocityCanonicalForm) {
  auto M = build_covelocity(1, 2, kPlan);
  EXPECT_TRUE(check_multiplicative(M.chart, covelocities(1, 2)).ok());
}

TEST(Multiplicative, AllModels) {
  for (const auto& M : all_models()) EXPECT_TRUE(check_multiplicative(M.chart, M.omega).ok()) << M.kind;
}

TEST(Multiplicative, NonMultiplicativeOnCovelocities) {
  // q-dependent rescaling of the fibre part is not additive
  auto M = build_covelocity(1, 1, kPlan);
  KForm w(2, 2, 1);
  w.add(0, {0, 1}, V(2, 1));
  EXPECT_EQ(check_multiplicative(M.chart, w).verdict_of("multiplicative"), Verdict::Fail);
}

TEST(UnitInverse, AllModels) {
  for (const auto& M : all_models()) {
    Report r = check_unit_inv(M.chart, M.omega);
    EXPECT_TRUE(r.ok()) << M.kind << ": " << failures(r);
    EXPECT_TRUE(pullback(M.chart.eps, M.omega).is_zero());
  }
}

TEST(UnitInverse, PairSwapExchangesPullbacks) {
  auto M = build_pair(proportional_plane_form(), kPlan);
  KForm w = proportional_plane_form();
  EXPECT_EQ(pullback(M.chart.inv, pullback(M.chart.t, w)), pullback(M.chart.s, w));
}

TEST(ImForm, InclusionFrameOfPassingStructures) {
  for (const auto& pp : passing_fixtures()) {
    Report r = check_im_form(to_algebroid(pp), pp.frame, pp.plan);
    EXPECT_TRUE(r.ok()) << failures(r);
  }
}

TEST(ImForm, ZeroAlgebroidWithZeroMuFails) {
  LieAlgebroidData A;
  A.n = 2;
  A.r = 1;
  A.anchor = {VectorField(2)};
  A.structure.assign(1, std::vector<std::vector<RatFun>>(1, std::vector<RatFun>(1, RatFun(2))));
  Report r = check_im_form(A, {CoSection(2, 1, 1)}, kPlan);
  EXPECT_EQ(r.verdict_of("im_antisymmetry"), Verdict::Pass);
  EXPECT_EQ(r.verdict_of("im_bracket"), Verdict::Pass);
  EXPECT_EQ(r.verdict_of("im_kernel"), Verdict::Fail);
}

TEST(ImForm, HeisenbergDirectSum) {
  auto pp = lie_poisson_direct_sum(heisenberg(), 2, kPlan);
  auto A = to_algebroid(pp);
  EXPECT_EQ(A.structure[0][1][2], RatFun::constant(6, -1));
  EXPECT_TRUE(check_im_form(A, pp.frame, kPlan).ok());
}

TEST(ImForm, WrongStructureConstantFailsBracketEquation) {
  auto pp = lie_poisson_direct_sum(heisenberg(), 2, kPlan);
  auto A = to_algebroid(pp);
  A.structure[0][1][2] = RatFun::constant(6, 1);
  A.structure[1][0][2] = RatFun::constant(6, -1);
  Report r = check_im_form(A, pp.frame, kPlan);
  EXPECT_EQ(r.verdict_of("im_bracket"), Verdict::Fail);
}

TEST(ImForm, AnchorBreakingAntisymmetry) {
  auto pp = trivial_structure(2, 1, kPlan);
  auto A = to_algebroid(pp);
  A.anchor[0] = VectorField::coordinate(2, 0);
  Report r = check_im_form(A, pp.frame, kPlan);
  EXPECT_EQ(r.verdict_of("im_antisymmetry"), Verdict::Fail);
}

TEST(ImForm, LengthMismatchIsError) {
  auto pp = trivial_structure(2, 1, kPlan);
  auto A = to_algebroid(pp);
  Report r = check_im_form(A, {pp.frame[0]}, kPlan);
  EXPECT_EQ(r.overall(), Verdict::Error);
}

TEST(Compatibility, AllModels) {
  for (const auto& M : all_models()) {
    Report r = check_compatibility(M);
    EXPECT_TRUE(r.ok()) << M.kind << ": " << failures(r);
  }
}

TEST(Compatibility, PairContractionAtPoints) {
  auto M = build_pair(proportional_plane_form(), kPlan);
  for (const auto& p : sample_points(SamplePlan{9, 3, 4, {}}, 4)) {
    for (std::size_t a = 0; a < 2; ++a) {
      KForm lhs = interior(M.uR[a], M.omega);
      KForm rhs = pullback(M.chart.t, M.mu[a]);
      for (std::size_t j = 0; j < 2; ++j) EXPECT_EQ(lhs.one_form_at(j, p), rhs.one_form_at(j, p));
      // first slot: i_{∂x}(dx∧dy) = dy at the target point, nothing at the source
      if (a == 0) EXPECT_EQ(lhs.one_form_at(0, p), (std::vector<Q>{0, 1, 0, 0}));
    }
  }
}

TEST(Compatibility, WrongFieldFails) {
  auto M = build_covelocity(1, 2, kPlan);
  std::swap(M.uR[0], M.uR[1]);
  EXPECT_EQ(check_compatibility(M).verdict_of("contraction"), Verdict::Fail);
}

TEST(Compatibility, WrongAnchorFails) {
  auto M = build_coadjoint(heisenberg(), 1, kPlan);
  M.algebroid.anchor[0] = VectorField(3);
  EXPECT_EQ(check_compatibility(M).verdict_of("anchor_along_units"), Verdict::Fail);
}

TEST(Compatibility, RightInvariantFieldsCloseUnderBracket) {
  auto M = build_coadjoint(heisenberg(), 2, kPlan);
  EXPECT_EQ(check_compatibility(M).verdict_of("right_invariant_bracket"), Verdict::Pass);
  // [u1^R, u2^R] = −u3^R
  EXPECT_EQ(lie_bracket(M.uR[0], M.uR[1]), Q(-1) * M.uR[2]);
}

TEST(Induced, CovelocityGivesTrivialStructure) {
  auto M = build_covelocity(2, 2, kPlan);
  auto pp = induced_structure(M);
  EXPECT_TRUE(check_structure(pp).ok());
  EXPECT_TRUE(compare_structures(pp, trivial_structure(2, 2, kPlan), kPlan).ok());
  EXPECT_TRUE(target_is_morphism(M, pp).ok());
}

TEST(Induced, PairGivesBaseForm) {
  for (const KForm& w : {proportional_plane_form(), covelocities(1, 2)}) {
    auto M = build_pair(w, kPlan);
    auto pp = induced_structure(M);
    auto ref = from_polysymplectic(w, kPlan);
    EXPECT_EQ(pp.frame, ref.frame);
    for (std::size_t a = 0; a < pp.rank(); ++a) EXPECT_EQ(pp.anchor[a], ref.anchor[a]);
    Report mor = target_is_morphism(M, pp);
    EXPECT_TRUE(mor.ok()) << failures(mor);
  }
}

TEST(Induced, CoadjointGivesDirectSum) {
  auto M = build_coadjoint(heisenberg(), 2, kPlan);
  auto pp = induced_structure(M);
  auto ref = lie_poisson_direct_sum(heisenberg(), 2, kPlan);
  EXPECT_EQ(pp.frame, ref.frame);
  for (std::size_t a = 0; a < pp.rank(); ++a) EXPECT_EQ(pp.anchor[a], ref.anchor[a]);
  EXPECT_TRUE(compare_structures(pp, ref, kPlan).ok());
  Report mor = target_is_morphism(M, pp);
  EXPECT_TRUE(mor.ok()) << failures(mor);
}

TEST(Induced, AbelianCoadjointIsTrivialAnchor) {
  auto M = build_coadjoint(abelian(2), 2, kPlan);
  EXPECT_TRUE(check_model(M).ok()) << failures(check_model(M));
  auto pp = induced_structure(M);
  for (const auto& X : pp.anchor) EXPECT_TRUE(X.is_zero());
}

TEST(Induced, RejectsFailingModel) {
  auto M = build_covelocity(1, 2, kPlan);
  M.mu[0] = Q(2) * M.mu[0];
  EXPECT_THROW(induced_structure(M), std::invalid_argument);
}

TEST(Coadjoint, TargetMatchesMatrixGroupOracle) {
  auto M = build_coadjoint(heisenberg(), 1, kPlan);
  for (const auto& p : sample_points(SamplePlan{4, 8, 5, {}}, 6)) {
    auto t = M.chart.t.evaluate(p);
    auto ref = coadjoint_oracle({p[0], p[1], p[2]}, {p[3], p[4], p[5]});
    for (int b = 0; b < 3; ++b) EXPECT_EQ(t[b], ref[b]);
  }
}

TEST(Coadjoint, MultiplicationMatchesMatrixGroupOracle) {
  auto M = build_coadjoint(heisenberg(), 1, kPlan);
  for (const auto& p : sample_points(SamplePlan{6, 8, 5, {}}, 9)) {
    auto prod = M.chart.m.evaluate(p);
    auto ref = group_log(mul(group_exp(p[0], p[1], p[2]), group_exp(p[3], p[4], p[5])));
    for (int b = 0; b < 3; ++b) EXPECT_EQ(prod[b], ref[b]);
  }
}

TEST(Coadjoint, UnipotentInTheFirstTwoCoordinates) {
  auto M = build_coadjoint(heisenberg(), 1, kPlan);
  // Ad*_(x,y,z)(α, β, γ) = (α + yγ, β − xγ, γ)
  std::size_t N = 6;
  std::vector<Poly> expect{V(N, 3) + V(N, 1) * V(N, 5), V(N, 4) - V(N, 0) * V(N, 5), V(N, 5)};
  EXPECT_EQ(M.chart.t.components(), expect);
}

TEST(Coadjoint, InverseUndoesAction) {
  auto M = build_coadjoint(heisenberg(), 2, kPlan);
  // Ad*_{g⁻¹} ∘ Ad*_g = id, i.e. t∘inv = s
  EXPECT_EQ(M.chart.t.after(M.chart.inv), M.chart.s);
  EXPECT_EQ(M.chart.inv.after(M.chart.inv), PolyMap::identity(M.chart.N));
}

TEST(Coadjoint, RejectsNonNilpotent) { EXPECT_THROW(build_coadjoint(so3(), 2, kPlan), std::invalid_argument); }

TEST(Coadjoint, FiliformClassThree) {
  // [e1,e2]=e3, [e1,e3]=e4
  LieAlgebra g(4, "filiform");
  g.set(0, 1, 2, 1);
  g.set(0, 2, 3, 1);
  ASSERT_EQ(g.nilpotency_class(), 3u);
  auto M = build_coadjoint(g, 1, kPlan);
  Report r = check_model(M);
  EXPECT_TRUE(r.ok()) << failures(r);
}

TEST(Nondegeneracy, BiconditionalOnModelsAndMutants) {
  std::vector<GroupoidModel> models = all_models();
  models.push_back(drop_component(build_covelocity(1, 2, kPlan), 1));
  models.push_back(drop_component(build_coadjoint(heisenberg(), 2, kPlan), 0));
  models.push_back(drop_component(build_pair(covelocities(1, 2), kPlan), 1));
  std::size_t degenerate = 0;
  for (const auto& M : models) {
    auto p = nondegeneracy_pair(M);
    EXPECT_EQ(p.omega_nondegenerate, p.im_nondegenerate) << M.kind;
    if (!p.omega_nondegenerate) ++degenerate;
  }
  EXPECT_EQ(degenerate, 3u);
}

TEST(Nondegeneracy, MutantStillMultiplicative) {
  auto M = drop_component(build_coadjoint(heisenberg(), 2, kPlan), 1);
  EXPECT_TRUE(check_multiplicative(M.chart, M.omega).ok());
  EXPECT_TRUE(check_compatibility(M).ok());
  EXPECT_FALSE(check_model(M).ok());
}

TEST(Product, MultiplicativeAndPolysymplectic) {
  auto A = build_pair(proportional_plane_form(), kPlan);
  auto B = build_coadjoint(heisenberg(), 1, kPlan);
  auto P = product_model(A, B);
  EXPECT_TRUE(check_groupoid_axioms(P.chart).ok());
  EXPECT_TRUE(check_multiplicative(P.chart, P.omega).ok());
  EXPECT_TRUE(check_unit_inv(P.chart, P.omega).ok());
  EXPECT_TRUE(is_polysymplectic(P.omega, kPlan).ok());
  EXPECT_EQ(P.omega.k(), 3u);
}

TEST(Product, ProjectionPullbacksAreMultiplicative) {
  auto A = build_covelocity(1, 2, kPlan);
  auto B = build_pair(proportional_plane_form(), kPlan);
  auto P = product_model(A, B);
  // projections intertwine the structure maps, so pulled-back multiplicative forms stay multiplicative
  EXPECT_EQ(P.arrows1.after(P.chart.m), A.chart.m.after(P.comp1));
  EXPECT_TRUE(check_multiplicative(P.chart, pullback(P.arrows1, A.omega)).ok());
  EXPECT_TRUE(check_multiplicative(P.chart, pullback(P.arrows2, B.omega)).ok());
}

TEST(Product, PullbackOfNonMultiplicativeFails) {
  auto A = build_covelocity(1, 1, kPlan);
  auto B = build_covelocity(1, 1, kPlan);
  auto P = product_model(A, B);
  KForm w(2, 2, 1);
  w.add(0, {0, 1}, V(2, 1));
  EXPECT_FALSE(check_multiplicative(P.chart, pullback(P.arrows1, w)).ok());
}
