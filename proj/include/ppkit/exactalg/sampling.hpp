#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "ppkit/exactalg/poly.hpp"

namespace ppkit {

using Point = std::vector<Q>;

struct SamplePlan {
  std::uint64_t seed = 1;
  std::size_t count = 5;
  long box = 3;
  std::vector<Poly> avoid;

  SamplePlan with_avoid(std::vector<Poly> extra) const {
    SamplePlan p = *this;
    for (auto& e : extra) p.avoid.push_back(std::move(e));
    return p;
  }
};

// The generator is mapped to integers by hand rather than through
// std::uniform_int_distribution, whose output differs between standard libraries.
inline std::vector<Point> sample_points(const SamplePlan& plan, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_points: n must be at least 1");
  if (plan.box < 1) throw std::invalid_argument("sample_points: box must be at least 1");
  for (const auto& p : plan.avoid) {
    if (p.nvars() != n) throw std::invalid_argument("sample_points: avoid polynomial has wrong arity");
    if (p.is_zero()) throw std::runtime_error("sample_points: avoid set contains the zero polynomial");
  }
  static constexpr std::array<long, 5> kDens{1, 2, 3, 5, 7};
  std::mt19937_64 gen(plan.seed * 0x9E3779B97F4A7C15ULL + n);
  auto draw = [&](std::uint64_t m) { return static_cast<long>(gen() % m); };

  std::vector<Point> out;
  std::set<Point> seen;
  std::size_t budget = 200 * plan.count + 1000;
  while (out.size() < plan.count) {
    if (budget-- == 0) {
      throw std::runtime_error("sample_points: could not find enough admissible points");
    }
    Point p(n);
    for (auto& c : p) {
      long d = kDens[draw(kDens.size())];
      long span = 2 * plan.box * d + 1;
      c = Q(draw(static_cast<std::uint64_t>(span)) - plan.box * d, d);
      c.canonicalize();
    }
    bool ok = !seen.count(p);
    for (const auto& a : plan.avoid) {
      if (!ok) break;
      ok = a.evaluate(p) != 0;
    }
    if (!ok) continue;
    seen.insert(p);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ppkit
