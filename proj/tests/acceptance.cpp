// Acceptance runner: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <array>
#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "flow_oracle.hpp"
#include "ppkit/avcourant/avcourant.hpp"
#include "ppkit/cartan/maps.hpp"
#include "ppkit/cli/render.hpp"
#include "ppkit/foliation/foliation.hpp"
#include "ppkit/groupoid/models.hpp"
#include "ppkit/reduction/models.hpp"
#include "support.hpp"

using namespace ppkit;
using namespace ppkit::fixtures;

namespace {

struct Tally {
  std::vector<std::string> notes;
  void need(bool ok, const std::string& what) {
    if (!ok) notes.push_back(what);
  }
};

using Matrix = std::vector<std::vector<Poly>>;

// w(∂a, ∂b) as a polynomial matrix, read straight off the stored components.
Matrix two_form_matrix(const KForm& w, std::size_t j) {
  std::size_t n = w.n();
  Matrix W(n, std::vector<Poly>(n, Poly(n)));
  for (const auto& [idx, f] : w.component(j)) {
    W[idx[0]][idx[1]] += f;
    W[idx[1]][idx[0]] -= f;
  }
  return W;
}

std::vector<Poly> one_form_vector(const KForm& w, std::size_t j) {
  std::vector<Poly> a(w.n(), Poly(w.n()));
  for (const auto& [idx, f] : w.component(j)) a[idx[0]] += f;
  return a;
}

// Coordinate formula for L_X on 1- and 2-forms.
std::vector<Poly> lie_one_form_coords(const VectorField& X, const std::vector<Poly>& a) {
  std::size_t n = a.size();
  std::vector<Poly> out(n, Poly(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < n; ++c) out[i] += X[c] * a[i].derivative(c) + a[c] * X[c].derivative(i);
  return out;
}

Matrix lie_two_form_coords(const VectorField& X, const Matrix& W) {
  std::size_t n = W.size();
  Matrix out(n, std::vector<Poly>(n, Poly(n)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t c = 0; c < n; ++c)
        out[a][b] += X[c] * W[a][b].derivative(c) + W[c][b] * X[c].derivative(a) + W[a][c] * X[c].derivative(b);
  return out;
}

void cartan_calculus(Tally& t) {
  testkit::RandomPolys rp(101);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 3 + trial % 2, r = 1 + trial % 2;
    KForm w = rp.form(n, r, 2, 2);
    VectorField X = rp.field(n, 2);
    t.need(ext_d(ext_d(w)).is_zero(), "d d w != 0");
    std::vector<Poly> comps;
    for (std::size_t i = 0; i < n; ++i) comps.push_back(rp.poly(n, 2, 3));
    PolyMap f(n, comps);
    t.need(pullback(f, ext_d(w)) == ext_d(pullback(f, w)), "pullback does not commute with d");
    KForm lw = lie_derivative(X, w);
    t.need(lie_derivative(X, ext_d(w)) == ext_d(lw), "L_X d != d L_X");
    for (std::size_t j = 0; j < w.k(); ++j) {
      if (r == 1)
        t.need(one_form_vector(lw, j) == lie_one_form_coords(X, one_form_vector(w, j)), "1-form Lie derivative disagrees with coordinates");
      else
        t.need(two_form_matrix(lw, j) == lie_two_form_coords(X, two_form_matrix(w, j)), "2-form Lie derivative disagrees with coordinates");
    }
    if (trial % 10 == 0) {
      std::vector<Poly> lin;
      for (std::size_t i = 0; i < n; ++i) {
        Poly p(n);
        for (std::size_t l = 0; l < n; ++l) p += Q(rp.integer(-2, 2)) * Poly::variable(n, l);
        lin.push_back(p);
      }
      VectorField A(lin);
      KForm w2 = rp.form(n, 2, 1, 2);
      KForm lw2 = lie_derivative(A, w2);
      Matrix exact = two_form_matrix(lw2, 0);
      auto pq = rp.point(n);
      std::vector<double> pd;
      for (const auto& q : pq) pd.push_back(q.get_d());
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          worst = std::max(worst, std::abs(exact[a][b].evaluate(pq).get_d() - testkit::fd_lie_derivative_two_form(A, w2, 0, pd, a, b, 1e-4)));
    }
  }
  t.need(worst < 1e-6, "flow oracle deviation " + std::to_string(worst));
}

void usual_poisson(Tally& t) {
  for (const auto& pp : k1_fixtures()) {
    t.need(check_structure(pp).ok(), "k = 1 fixture fails the structure checks");
    auto pi = bivector_of(pp);
    t.need(bivector_jacobi(pi), "bivector oracle: Jacobi fails");
    auto mons = monomials_up_to_two(pp.n);
    auto field_of = [&](const Poly& h) {
      VectorField X(pp.n);
      for (std::size_t l = 0; l < pp.n; ++l) {
        RatFun s(pp.n);
        for (std::size_t i = 0; i < pp.n; ++i) s += RatFun(h.derivative(i)) * pi[i][l];
        X[l] = s.num() * Q(1 / s.den().constant_term());
      }
      return X;
    };
    for (const auto& f : mons)
      for (const auto& g : mons) {
        KForm df = ext_d(KForm::functions({f})), dg = ext_d(KForm::functions({g}));
        KForm lhs = lie_derivative(field_of(f), dg) - interior(field_of(g), ext_d(df));
        RatFun pfg = poisson(pi, RatFun(f), RatFun(g));
        KForm rhs = ext_d(KForm::functions({pfg.num() * Q(1 / pfg.den().constant_term())}));
        t.need(lhs == rhs, "[df, dg] != d{f, g}");
      }
  }
  t.need(!bivector_jacobi(bivector_of(bivector_structure(non_poisson_bivector(), kPlan))), "oracle misses a non-Poisson bivector");
  t.need(check_structure(bivector_structure(non_poisson_bivector(), kPlan)).verdict_of("anchor_bracket") == Verdict::Fail,
         "non-Poisson bivector passes");
}

bool only_fails(const Report& r, const std::vector<std::string>& failing) {
  for (const auto& c : r.checks) {
    bool want = std::find(failing.begin(), failing.end(), c.name) != failing.end();
    if (want != (c.verdict == Verdict::Fail)) return false;
  }
  return true;
}

void structure_clauses(Tally& t) {
  for (const auto& pp : passing_fixtures()) {
    t.need(check_structure(pp).ok(), "passing fixture fails");
    auto A = to_algebroid(pp);
    for (std::size_t a = 0; a < A.r; ++a)
      for (std::size_t b = a + 1; b < A.r; ++b)
        for (std::size_t c = b + 1; c < A.r; ++c)
          for (const auto& v : jacobiator(A, a, b, c)) t.need(v.is_zero(), "Jacobiator nonzero");
  }
  t.need(only_fails(check_structure(single_covector_plane()), {"annihilator"}), "single covector: wrong clause");

  // the flat pair alone already misses the annihilator clause; the perturbation adds exactly the anchor clause
  auto flat = flat_pair_on_three_space();
  t.need(only_fails(check_structure(flat), {"annihilator"}) && check_weak(flat).ok(), "flat pair baseline");
  flat.anchor[1][2] = V(3, 0);
  t.need(only_fails(check_structure(flat), {"annihilator", "anchor_bracket"}), "anchor perturbation: wrong clause");
  t.need(only_fails(check_weak(flat), {"anchor_bracket"}), "anchor perturbation: wrong weak clause");

  auto heis = lie_poisson_direct_sum(heisenberg(), 1, kPlan);
  heis.anchor[0][1] += V(3, 0);
  t.need(check_structure(heis).verdict_of("antisymmetry") == Verdict::Fail, "antisymmetry perturbation passes");

  auto pi = zero_bivector(4);
  Poly s = C(4, 1) + V(4, 0) * V(4, 0);
  pi[0][2] = s;
  pi[2][0] = -s;
  pi[1][3] = s;
  pi[3][1] = -s;
  auto conformal = bivector_structure(pi, kPlan);
  t.need(only_fails(check_structure(conformal), {"anchor_bracket"}), "conformal anchor: wrong clause");
  t.need(!bivector_jacobi(bivector_of(conformal)), "oracle: conformal bivector satisfies Jacobi");
}

void foliation_reconstruction(Tally& t) {
  const SamplePlan dense{11, 25, 3, {}};
  Distribution xy{3, {VectorField::coordinate(3, 0), VectorField::coordinate(3, 1)}, dense};
  KForm dt(3, 1, 1);
  dt.add(0, {2}, C(3, 1));
  Distribution xy4{4, {VectorField::coordinate(4, 0), VectorField::coordinate(4, 1)}, dense};
  KForm curved(4, 2, 2);
  curved.add(0, {0, 1}, C(4, 1) + V(4, 2) * V(4, 2));
  curved.add(1, {0, 1}, V(4, 3) * V(4, 3) + C(4, 2));
  KForm dz(4, 1, 1), dw(4, 1, 1);
  dz.add(0, {2}, C(4, 1));
  dw.add(0, {3}, C(4, 1));

  struct Case {
    Reconstruction rec;
    std::size_t n, k, p;
  };
  std::vector<Case> cases;
  cases.push_back({structure_from_foliation(xy, time_family_form()), 3, 2, 2});
  cases.push_back({structure_from_foliation(xy, time_family_form(C(3, 1) + V(3, 2) * V(3, 2)), std::vector<KForm>{dt}), 3, 2, 2});
  cases.push_back({structure_from_foliation(xy4, curved, std::vector<KForm>{dz, dw}), 4, 2, 2});
  for (const auto& c : cases) {
    t.need(c.rec.report.ok(), "reconstruction report fails");
    t.need(c.rec.points.size() >= 25, "fewer than 25 points");
    for (const auto& ps : c.rec.points)
      t.need(span_rank(ps.span, c.n * c.k) == c.k * (c.n - c.p) + c.p, "dimension formula fails");
  }

  std::vector<PolyPoissonStruct> trio{time_family(1), time_family(2), time_family(3)};
  for (const auto& pp : trio) t.need(check_structure(pp).ok(), "time family member fails");
  for (const auto& m : sample_points(dense, 3)) {
    auto ref = leafwise_form_at(trio[0], m);
    for (const auto& pp : trio) {
      auto lf = leafwise_form_at(pp, m);
      t.need(lf.basis == ref.basis && lf.values == ref.values, "time family leaf data differ");
    }
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b) t.need(!compare_structures(trio[a], trio[b], kPlan).ok(), "time family members coincide");

  KForm w(2, 2, 1);
  w.add(0, {0, 1}, C(2, 1) + V(2, 0) * V(2, 0));
  for (const auto& pp : {from_polysymplectic(covelocities(2, 2), kPlan), from_polysymplectic(w, kPlan)}) {
    std::vector<PointwiseStructure> pts;
    for (const auto& m : sample_points(kPlan, pp.n)) pts.push_back(reconstruct_at(pp.n, pp.k, leafwise_form_at(pp, m)));
    t.need(same_span_check(pp, pts).verdict == Verdict::Pass, "nondegenerate round trip changes the span");
  }
}

void graph_clauses(Tally& t) {
  for (const auto& pp : passing_fixtures()) {
    AVSubbundle L = graph(pp);
    Report r = classify(L);
    for (const char* c : {"isotropic", "involutive", "relaxed_lagrangian", "perp_meets_tangent_trivially", "meets_tangent_trivially"})
      t.need(r.verdict_of(c) == Verdict::Pass, std::string("graph clause ") + c);
    auto back = extract(L);
    t.need(back.frame == pp.frame, "extract changes the frame");
    for (std::size_t a = 0; a < pp.rank(); ++a) t.need(back.anchor[a] == pp.anchor[a], "extract changes the anchor");
  }
  AVSubbundle H = graph(lie_poisson_direct_sum(heisenberg(), 2, kPlan));
  AVPointData d = av_point_data(H, Point(6));
  t.need(d.dim_L == 3 && d.dim_perp == 12, "Heisenberg dimensions at the origin");
  t.need(classify(H).verdict_of("lagrangian") == Verdict::Fail, "Heisenberg graph counted Lagrangian");
  auto k1 = k1_fixtures();
  for (const auto& pp : k1) {
    Report r = classify(graph(pp));
    t.need(r.verdict_of("lagrangian") == r.verdict_of("relaxed_lagrangian"), "k = 1: Lagrangian and relaxed differ");
  }
  Report small = classify(graph(single_covector_plane(), false));
  t.need(small.verdict_of("lagrangian") == small.verdict_of("relaxed_lagrangian"), "k = 1 isotropic: Lagrangian and relaxed differ");
}

KForm proportional_plane_form() {
  KForm w(2, 2, 2);
  w.add(0, {0, 1}, C(2, 1));
  w.add(1, {0, 1}, C(2, 2));
  return w;
}

void groupoid_models(Tally& t) {
  std::vector<std::pair<GroupoidModel, PolyPoissonStruct>> cases{
      {build_pair(proportional_plane_form(), kPlan), from_polysymplectic(proportional_plane_form(), kPlan)},
      {build_pair(covelocities(1, 2), kPlan), from_polysymplectic(covelocities(1, 2), kPlan)},
      {build_covelocity(2, 2, kPlan), trivial_structure(2, 2, kPlan)},
      {build_covelocity(1, 2, kPlan), trivial_structure(1, 2, kPlan)},
      {build_coadjoint(heisenberg(), 2, kPlan), lie_poisson_direct_sum(heisenberg(), 2, kPlan)},
  };
  std::vector<GroupoidModel> all;
  for (const auto& [M, ref] : cases) {
    t.need(check_groupoid_axioms(M.chart).ok(), M.kind + ": groupoid axioms fail");
    t.need(check_model(M).ok(), M.kind + ": model checks fail");
    auto pp = induced_structure(M);
    t.need(compare_structures(pp, ref, kPlan).ok(), M.kind + ": induced structure differs");
    t.need(target_is_morphism(M, pp).ok(), M.kind + ": target is not a morphism");
    all.push_back(M);
  }
  all.push_back(drop_component(build_covelocity(1, 2, kPlan), 1));
  all.push_back(drop_component(build_coadjoint(heisenberg(), 2, kPlan), 0));
  all.push_back(drop_component(build_pair(covelocities(1, 2), kPlan), 1));
  std::size_t degenerate = 0;
  for (const auto& M : all) {
    auto p = nondegeneracy_pair(M);
    t.need(p.omega_nondegenerate == p.im_nondegenerate, M.kind + ": nondegeneracy biconditional");
    if (!p.omega_nondegenerate) ++degenerate;
  }
  t.need(degenerate == 3, "mutants not all degenerate");
}

void reduction(Tally& t) {
  auto cov = from_polysymplectic(covelocities(2, 2), kPlan);
  auto C3 = cotangent_left_multiplication(heisenberg(), 2);
  auto heis = from_polysymplectic(C3.omega, kPlan);
  t.need(check_reducible(cov, lifted_translation(2, 2, 0)).ok(), "translation not reducible");
  t.need(check_reducible(heis, C3.action).ok(), "Heisenberg not reducible");

  auto rt = reduce_structure(cov, lifted_translation(2, 2, 0), drop_coordinate(6, 0));
  auto rh = reduce_structure(heis, C3.action, C3.quotient);
  t.need(rt.structure && rt.report.ok(), "translation reduction fails");
  t.need(rh.structure && rh.report.ok(), "Heisenberg reduction fails");
  if (!rt.structure || !rh.structure) return;
  t.need(check_structure(*rt.structure).ok() && check_structure(*rh.structure).ok(), "reduced structure fails the structure checks");
  t.need(is_morphism(drop_coordinate(6, 0).pi, cov, *rt.structure).ok(), "translation quotient map not a morphism");
  t.need(is_morphism(C3.quotient.pi, heis, *rh.structure).ok(), "Heisenberg quotient map not a morphism");
  t.need(compare_structures(*rh.structure, lie_poisson_direct_sum(heisenberg(), 2, plan_for(kPlan, 6)), kPlan).ok(),
         "Heisenberg quotient is not Lie-Poisson");

  auto lt = level_reduce(covelocities(2, 2), lifted_translation(2, 2, 0), translation_moment(2, 2, 0), translation_zero_level(2, 2, 0), kPlan);
  t.need(lt.form && *lt.form == covelocities(1, 2), "zero level is not the smaller covelocity space");
  Point zeta{Q(1), Q(0), Q(2), Q(0), Q(1), Q(1)};
  LevelSetModel Lh = cotangent_level(C3, zeta, drop_coordinate(3, 2));
  auto lh = level_reduce(C3.omega, C3.action, C3.moment, Lh, kPlan);
  t.need(lh.form && lh.report.ok(), "Heisenberg level reduction fails");
  if (lt.form) {
    auto pts = sample_points(plan_for(kPlan, 3), 3);
    t.need(pts.size() >= 3, "too few leaf points");
    t.need(compare_leaf(*rt.structure, drop_coordinate(6, 0), translation_zero_level(2, 2, 0), *lt.form, pts).ok(), "translation leaf differs");
  }
  if (lh.form) {
    auto pts = sample_points(plan_for(kPlan, 2), 2);
    t.need(pts.size() >= 3, "too few leaf points");
    t.need(compare_leaf(*rh.structure, C3.quotient, Lh, *lh.form, pts).ok(), "Heisenberg leaf differs");
  }

  struct Case {
    KForm omega;
    ActionData act;
    MomentData J;
    LevelSetModel L;
  };
  std::vector<Case> cases;
  for (std::size_t i = 0; i < 2; ++i) cases.push_back({covelocities(2, 2), lifted_translation(2, 2, i), translation_moment(2, 2, i), translation_zero_level(2, 2, i)});
  auto P = product_translation(Q(1), Q(-2));
  cases.push_back({P.omega, P.action, P.moment, P.level});
  cases.push_back({C3.omega, C3.action, C3.moment, Lh});
  KForm split(3, 2, 2);
  split.add(0, {0, 1}, C(3, 1));
  split.add(1, {0, 2}, C(3, 1));
  ActionData ytr;
  ytr.m = 1;
  ytr.generators = {VectorField::coordinate(3, 1)};
  ytr.family = PolyMap(4, {V(4, 0), V(4, 1) + V(4, 3), V(4, 2)});
  ytr.algebra = abelian(1);
  cases.push_back({split, ytr, MomentData{2, 1, PolyMap(3, {-V(3, 0), Poly(3)})},
                   LevelSetModel{Point(2), PolyMap(2, {Poly(2), V(2, 0), V(2, 1)}), drop_coordinate(2, 0)}});
  std::size_t reducible = 0;
  for (const auto& c : cases) {
    bool red = check_reducible(from_polysymplectic(c.omega, kPlan), c.act).ok();
    auto lv = level_reduce(c.omega, c.act, c.J, c.L, kPlan);
    if (red) {
      ++reducible;
      t.need(lv.report.verdict_of("criterion") == Verdict::Pass, "reducible but criterion fails");
    }
  }
  t.need(reducible == 4, "expected four reducible cases, got " + std::to_string(reducible));
}

void groupoid_reduction(Tally& t) {
  auto cv = reduce_groupoid(covelocity_translation(2, 2, 0, kPlan));
  t.need(cv.report.ok() && cv.model && cv.base, "covelocity reduction fails");
  if (cv.model && cv.base) {
    t.need(check_groupoid_axioms(cv.model->chart).ok(), "reduced chart fails the axioms");
    t.need(check_model(*cv.model).ok(), "reduced covelocity model fails");
    t.need(cv.model->omega == build_covelocity(1, 2, kPlan).omega, "reduced covelocity form");
    t.need(compare_structures(induced_structure(*cv.model), *cv.base, kPlan).ok(), "covelocity: induced differs from base reduction");
    t.need(compare_structures(*cv.base, trivial_structure(1, 2, kPlan), kPlan).ok(), "covelocity: base reduction is not trivial");
  }
  auto pr = reduce_groupoid(pair_plane_translation(proportional_plane_form(), kPlan));
  t.need(pr.report.ok() && pr.model && pr.base, "pair reduction fails");
  if (pr.model && pr.base) {
    t.need(check_groupoid_axioms(pr.model->chart).ok(), "reduced chart fails the axioms");
    t.need(check_model(*pr.model).ok(), "reduced pair model fails");
    t.need(pr.model->omega == proportional_plane_form(), "reduced pair form");
    t.need(compare_structures(induced_structure(*pr.model), *pr.base, kPlan).ok(), "pair: induced differs from base reduction");
  }
}

std::string run_capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf;
  for (std::size_t n; (n = fread(buf.data(), 1, buf.size(), p)) > 0;) out.append(buf.data(), n);
  int rc = pclose(p);
  status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void cli_determinism(Tally& t) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(PPKIT_SCENARIO_DIR))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  t.need(files.size() >= 10, "scenario corpus too small");
  std::string args;
  for (const auto& f : files) args += " '" + f.string() + "'";
  std::string cmd = std::string("'") + PPKIT_PPCHECK + "' check --format structured" + args;
  int s1 = 0, s2 = 0;
  std::string a = run_capture(cmd, s1), b = run_capture(cmd, s2);
  t.need(s1 == 0 && s2 == 0, "ppcheck exit status " + std::to_string(s1));
  t.need(a == b, "structured output differs between runs");
  auto vecs = ppkit::cli::verdicts_from_structured(a);
  t.need(vecs.size() == files.size(), "scenario count");
  for (std::size_t i = 0; i < files.size() && i < vecs.size(); ++i) {
    std::string got;
    for (const auto& [name, v] : vecs[i].second) got += name + " " + v + "\n";
    auto golden = files[i];
    golden.replace_extension(".golden");
    t.need(got == slurp(golden), files[i].filename().string() + ": verdicts differ from golden");
  }
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<void(Tally&)>>> criteria{
      {"exterior derivative, pullback and Lie derivative agree with independent oracles", cartan_calculus},
      {"k = 1 structures reproduce the bivector bracket", usual_poisson},
      {"structure clauses accept builders and isolate mutant failures", structure_clauses},
      {"foliation reconstruction dimension, shared leaf data and round trip", foliation_reconstruction},
      {"graph clauses, Heisenberg degeneracy and extract inverse", graph_clauses},
      {"groupoid builders, induced structures and nondegeneracy", groupoid_models},
      {"reduction, level sets and leaf comparison", reduction},
      {"groupoid reduction integrates the base reduction", groupoid_reduction},
      {"command line output is deterministic and matches goldens", cli_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Tally t;
    try {
      criteria[i].second(t);
    } catch (const std::exception& e) {
      t.notes.push_back(std::string("exception: ") + e.what());
    }
    bool ok = t.notes.empty();
    if (!ok) ++failed;
    std::cout << "criterion " << i + 1 << " " << criteria[i].first << ": " << (ok ? "PASS" : "FAIL");
    if (!ok) std::cout << " (" << t.notes.front() << (t.notes.size() > 1 ? ", +" + std::to_string(t.notes.size() - 1) + " more" : "") << ")";
    std::cout << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria pass\n";
  return failed == 0 ? 0 : 1;
}
