#pragma once

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ppkit/exactalg/matrix.hpp"
#include "ppkit/exactalg/sampling.hpp"
#include "ppkit/report.hpp"

namespace ppkit {

inline std::string point_str(std::span<const Q> p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += p[i].get_str();
  }
  return s + ")";
}

// The plan restricted to n-dimensional avoid polynomials, plus extra ones.
inline SamplePlan plan_for(const SamplePlan& plan, std::size_t n, const std::vector<Poly>& extra = {}) {
  SamplePlan p = plan;
  p.avoid.clear();
  for (const auto& a : plan.avoid) {
    if (a.nvars() == n) p.avoid.push_back(a);
  }
  for (const auto& a : extra) {
    if (a.nvars() == n && !a.is_constant()) p.avoid.push_back(a);
  }
  return p;
}

struct RankProfile {
  std::size_t generic = 0;
  std::vector<std::pair<Point, std::size_t>> samples;
};

inline RankProfile rank_profile(const Mat& m, const SamplePlan& plan) {
  RankProfile out;
  out.generic = generic_rank(m);
  auto pts = sample_points(plan_for(plan, m.nvars(), m.denominators()), m.nvars());
  for (auto& p : pts) {
    out.samples.emplace_back(p, rank(*m.evaluate(p)));
  }
  return out;
}

// PASS iff the generic rank and every sampled rank equal `expected`.
inline Check rank_check(const std::string& name, const Mat& m, std::size_t expected, const SamplePlan& plan) {
  Check c{name, Verdict::Pass, {}, {}, 0};
  RankProfile rp = rank_profile(m, plan);
  std::ostringstream d;
  d << "generic rank " << rp.generic << ", expected " << expected;
  if (rp.generic != expected) {
    c.verdict = Verdict::Fail;
    c.witnesses.push_back("generic rank " + std::to_string(rp.generic));
  }
  std::size_t drops = 0;
  for (const auto& [p, r] : rp.samples) {
    if (r != expected) {
      ++drops;
      c.verdict = Verdict::Fail;
      c.witnesses.push_back("rank " + std::to_string(r) + " at " + point_str(p));
    }
  }
  d << "; " << rp.samples.size() - drops << "/" << rp.samples.size() << " sample points at rank " << expected;
  c.detail = d.str();
  return c;
}

}  // namespace ppkit
