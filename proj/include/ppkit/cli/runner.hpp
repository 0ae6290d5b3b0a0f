#pragma once

#include <chrono>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/cli/scenario.hpp"

namespace ppkit::cli {

using SuiteFn = std::function<void(Report&)>;

struct Suite {
  std::string name;
  SuiteFn run;
};

namespace detail {

// Leaf forms at sample points and the pointwise reconstruction from them.
inline void leaf_suite(Report& rep, const PolyPoissonStruct& pp) {
  rep.absorb(distribution_report(distribution(pp)), "");
  Check leaf{"leaf_form", Verdict::Pass, "leafwise forms are antisymmetric and nondegenerate at regular sample points", {}, 0};
  Check rec{"reconstruction", Verdict::Pass, "S_m lies in the structure rebuilt from the leaf data, with the same anchor", {}, 0};
  Check dim{"dimension", Verdict::Pass, "rebuilt structure has rank k(n - p) + p", {}, 0};
  Check maximal{"maximal", Verdict::Pass, "S_m equals the structure rebuilt from the leaf data", {}, 0};
  std::size_t used = 0;
  for (const auto& m : sample_points(plan_for(pp.plan, pp.n), pp.n)) {
    LeafFormAtPoint lf;
    try {
      lf = leafwise_form_at(pp, m);
    } catch (const std::domain_error&) {
      continue;
    }
    ++used;
    Check c = leaf_form_check(lf);
    if (c.verdict != Verdict::Pass) {
      leaf.verdict = c.verdict;
      for (auto& w : c.witnesses) leaf.witnesses.push_back(w + " at " + point_str(m));
      continue;
    }
    PointwiseStructure ps;
    try {
      ps = reconstruct_at(pp.n, pp.k, lf);
    } catch (const std::domain_error& e) {
      rec.verdict = Verdict::Fail;
      rec.witnesses.push_back(std::string(e.what()) + " at " + point_str(m));
      continue;
    }
    std::size_t big = span_rank(ps.span, pp.k * pp.n), want = pp.k * (pp.n - lf.p) + lf.p;
    if (big != want) {
      dim.verdict = Verdict::Fail;
      dim.witnesses.push_back("rank " + std::to_string(big) + ", expected " + std::to_string(want) + " at " + point_str(m));
    }
    std::vector<std::vector<Q>> mine;
    for (std::size_t a = 0; a < pp.rank(); ++a) mine.push_back(stacked_at(pp.frame[a], m));
    for (std::size_t a = 0; a < pp.rank(); ++a) {
      auto cols = ps.span;
      cols.push_back(mine[a]);
      bool matched = false;
      for (const auto& z : nullspace(QMat::from_columns(cols, pp.k * pp.n))) {
        if (z.back() == 0) continue;
        std::vector<Q> X(pp.n);
        for (std::size_t e = 0; e < ps.span.size(); ++e)
          for (std::size_t i = 0; i < pp.n; ++i) X[i] -= z[e] / z.back() * ps.anchor[e][i];
        matched = X == pp.anchor[a].evaluate(m);
        break;
      }
      if (!matched) {
        rec.verdict = Verdict::Fail;
        rec.witnesses.push_back("frame element " + std::to_string(a) + " at " + point_str(m));
      }
    }
    std::size_t small = span_rank(mine, pp.k * pp.n);
    if (small != big) {
      maximal.verdict = Verdict::Fail;
      maximal.witnesses.push_back("rank " + std::to_string(small) + " inside rank " + std::to_string(big) + " at " + point_str(m));
    }
  }
  leaf.detail += "; " + std::to_string(used) + " regular points";
  rep.checks.push_back(std::move(leaf));
  rep.checks.push_back(std::move(rec));
  rep.checks.push_back(std::move(dim));
  rep.checks.push_back(std::move(maximal));
}

inline std::vector<Suite> suites_for(const Scenario& sc) {
  std::vector<Suite> out;
  auto add = [&](std::string name, SuiteFn f) { out.push_back({std::move(name), std::move(f)}); };
  if (auto* in = std::get_if<PolysymplecticInput>(&sc.payload)) {
    const SamplePlan plan = sc.sample;
    add("form", [in, plan](Report& r) { r = is_polysymplectic(in->w.form, plan, in->w.names); });
    add("structure", [in, plan](Report& r) { r = check_structure(from_polysymplectic(in->w.form, plan)); });
    add("graph", [in, plan](Report& r) { r = classify(form_graph(in->w.form, plan)); });
  } else if (auto* in = std::get_if<StructureInput>(&sc.payload)) {
    add("structure", [in](Report& r) { r = check_structure(in->pp); });
    add("weak", [in](Report& r) { r = check_weak(in->pp); });
    add("graph", [in](Report& r) { r = classify(graph(in->pp, false)); });
    add("leaves", [in](Report& r) { leaf_suite(r, in->pp); });
  } else if (auto* in = std::get_if<FoliationInput>(&sc.payload)) {
    if (in->pp) {
      add("distribution", [in](Report& r) { r = distribution_report(distribution(*in->pp)); });
      add("leaves", [in](Report& r) {
        leaf_suite(r, *in->pp);
        std::erase_if(r.checks, [](const Check& c) { return c.name == "regular" || c.name == "constant_rank"; });
      });
    } else {
      add("reconstruction", [in](Report& r) { r = structure_from_foliation(*in->D, in->w->form, in->annihilator).report; });
    }
  } else if (auto* in = std::get_if<AVInput>(&sc.payload)) {
    add("classify", [in](Report& r) { r = classify(in->L); });
    add("extract", [in](Report& r) {
      PolyPoissonStruct pp = extract(in->L);
      AVSubbundle back = graph(pp, false);
      Check& c = r.add("round_trip", Verdict::Pass, "graph of the extracted structure is the input subbundle");
      if (back.frame.size() != in->L.frame.size()) c.verdict = Verdict::Fail;
      for (std::size_t a = 0; a < back.frame.size() && c.verdict == Verdict::Pass; ++a)
        if (!(back.frame[a] == in->L.frame[a])) {
          c.verdict = Verdict::Fail;
          c.witnesses.push_back("frame element " + std::to_string(a) + " differs");
        }
      r.absorb(check_structure(pp), "structure");
    });
  } else if (auto* in = std::get_if<GroupoidInput>(&sc.payload)) {
    add("model", [in](Report& r) { r = check_model(in->M); });
    add("nondegeneracy", [in](Report& r) {
      NondegeneracyPair p = nondegeneracy_pair(in->M);
      r.add("biconditional", p.omega_nondegenerate == p.im_nondegenerate ? Verdict::Pass : Verdict::Fail,
            std::string("omega nondegenerate: ") + (p.omega_nondegenerate ? "yes" : "no") +
                ", IM form nondegenerate: " + (p.im_nondegenerate ? "yes" : "no"));
    });
    add("induced", [in](Report& r) {
      PolyPoissonStruct pp = induced_structure(in->M);
      r.absorb(check_structure(pp), "structure");
      r.absorb(target_is_morphism(in->M, pp), "target");
    });
  } else if (auto* in = std::get_if<ReductionInput>(&sc.payload)) {
    const SamplePlan plan = sc.sample;
    const KForm& w = in->omega.form;
    add("action", [in, &w, plan](Report& r) { r = check_action(*in->action, w.n(), plan); });
    if (in->moment) {
      add("moment", [in, &w](Report& r) { r = check_moment(w, *in->action, *in->moment); });
      add("morphism", [in, &w, plan](Report& r) { r = moment_is_morphism(w, *in->moment, in->action->algebra, plan); });
    }
    if (!in->groupoid) {
      add("reducible", [in, &w, plan](Report& r) { r = check_reducible(from_polysymplectic(w, plan), *in->action); });
      if (in->quotient)
        add("reduce", [in, &w, plan](Report& r) { r = reduce_structure(from_polysymplectic(w, plan), *in->action, *in->quotient).report; });
    }
    if (in->level) {
      add("level", [in, &w, plan](Report& r) { r = level_reduce(w, *in->action, *in->moment, *in->level, plan).report; });
      if (in->quotient)
        add("leaf", [in, &w, plan](Report& r) {
          auto red = reduce_structure(from_polysymplectic(w, plan), *in->action, *in->quotient);
          auto lv = level_reduce(w, *in->action, *in->moment, *in->level, plan);
          if (!red.structure || !lv.form) {
            std::vector<std::string> why;
            auto first = [](const Report& rep) {
              const Check* c = rep.first_failure();
              return c ? c->name : std::string("no result");
            };
            if (!red.structure) why.push_back("quotient reduction stopped at " + first(red.report));
            if (!lv.form) why.push_back("level-set reduction stopped at " + first(lv.report));
            r.add("inputs", Verdict::Fail, "quotient or level-set reduction did not produce a result", why);
            return;
          }
          std::size_t d = in->level->residual.sigma.domain_dim();
          std::vector<Point> pts = d == 0 ? std::vector<Point>{Point{}} : sample_points(plan_for(plan, d), d);
          r = compare_leaf(*red.structure, *in->quotient, *in->level, *lv.form, pts);
        });
    }
    if (in->groupoid) {
      add("groupoid_moment", [in](Report& r) { r = check_groupoid_moment(in->groupoid->model.chart, in->groupoid->moment); });
      add("groupoid", [in](Report& r) { r = reduce_groupoid(*in->groupoid).report; });
    }
  }
  return out;
}

}  // namespace detail

inline std::vector<std::string> suite_names(const Scenario& sc) {
  std::vector<std::string> v;
  for (const auto& s : detail::suites_for(sc)) v.push_back(s.name);
  return v;
}

// Runs the selected suites (all when empty) in their fixed order; exceptions become ERROR verdicts.
inline Report run_suite(const Scenario& sc, const std::set<std::string>& which = {}) {
  Report rep;
  rep.subject = sc.name;
  rep.conventions = sc.conventions;
  for (const auto& s : detail::suites_for(sc)) {
    if (!which.empty() && !which.count(s.name)) continue;
    Report part;
    auto t0 = std::chrono::steady_clock::now();
    try {
      s.run(part);
    } catch (const std::exception& e) {
      part.checks.clear();
      part.add("internal", Verdict::Error, "exception while running the suite", {e.what()});
      part.checks.back().seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    rep.absorb(part, s.name);
  }
  return rep;
}

enum class Outcome { AsExpected, Unexpected, Error };

struct CheckOutcome {
  const Check* check = nullptr;
  Verdict expected = Verdict::Pass;
  bool as_expected = true;
};

struct ScenarioResult {
  std::string file;
  std::optional<Scenario> scenario;
  std::string error;
  Report report;
  std::vector<CheckOutcome> checks;
  std::vector<std::string> missing;  // expected checks that did not run
  Outcome outcome = Outcome::AsExpected;
};

inline bool matches(Verdict actual, Verdict expected) {
  if (expected == Verdict::Pass) return actual == Verdict::Pass || actual == Verdict::Warn;
  return actual == expected;
}

inline void judge(ScenarioResult& res, const std::set<std::string>& which) {
  const Scenario& sc = *res.scenario;
  bool error = false, unexpected = false;
  for (const auto& c : res.report.checks) {
    CheckOutcome o{&c, Verdict::Pass, true};
    if (auto it = sc.expect.find(c.name); it != sc.expect.end()) o.expected = it->second;
    o.as_expected = matches(c.verdict, o.expected);
    if (!o.as_expected) (c.verdict == Verdict::Error ? error : unexpected) = true;
    res.checks.push_back(o);
  }
  for (const auto& [name, v] : sc.expect) {
    if (res.report.find(name)) continue;
    std::string suite = name.substr(0, name.find('.'));
    if (!which.empty() && !which.count(suite)) continue;
    res.missing.push_back(name);
    unexpected = true;
  }
  res.outcome = error ? Outcome::Error : unexpected ? Outcome::Unexpected : Outcome::AsExpected;
}

inline ScenarioResult run_scenario_text(const std::string& file, const std::string& text, const SampleOverride& ov,
                                        const std::set<std::string>& which) {
  ScenarioResult res;
  res.file = file;
  try {
    res.scenario = parse_scenario(text, ov);
  } catch (const std::exception& e) {
    res.error = e.what();
    res.outcome = Outcome::Error;
    return res;
  }
  res.report = run_suite(*res.scenario, which);
  judge(res, which);
  return res;
}

inline int exit_code(const std::vector<ScenarioResult>& results) {
  int code = 0;
  for (const auto& r : results) {
    if (r.outcome == Outcome::Error) return 2;
    if (r.outcome == Outcome::Unexpected) code = 1;
  }
  return code;
}

}  // namespace ppkit::cli
