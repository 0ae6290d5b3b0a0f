#pragma once

#include <chrono>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ppkit {

enum class Verdict { Pass, Fail, Warn, Error };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Warn: return "WARN";
    case Verdict::Error: return "ERROR";
  }
  return "ERROR";
}

struct Check {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::string detail;
  std::vector<std::string> witnesses;
  double seconds = 0;
};

inline std::map<std::string, std::string> default_conventions() {
  return {
      {"canonical_symplectic", "omega = sum_i dq_i ^ dp_i"},
      {"coadjoint", "<ad*_u zeta, v> = -<zeta, [u, v]>"},
      {"interior", "contraction in the first slot"},
  };
}

struct Report {
  std::string subject;
  std::map<std::string, std::string> conventions = default_conventions();
  std::vector<Check> checks;

  bool ok() const {
    for (const auto& c : checks) {
      if (c.verdict == Verdict::Fail || c.verdict == Verdict::Error) return false;
    }
    return true;
  }

  Verdict overall() const {
    Verdict v = Verdict::Pass;
    for (const auto& c : checks) {
      if (c.verdict == Verdict::Error) return Verdict::Error;
      if (c.verdict == Verdict::Fail) v = Verdict::Fail;
      if (c.verdict == Verdict::Warn && v == Verdict::Pass) v = Verdict::Warn;
    }
    return v;
  }

  const Check* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  Verdict verdict_of(const std::string& name) const {
    const Check* c = find(name);
    return c ? c->verdict : Verdict::Error;
  }

  // First failing check, or nullptr.
  const Check* first_failure() const {
    for (const auto& c : checks) {
      if (c.verdict == Verdict::Fail || c.verdict == Verdict::Error) return &c;
    }
    return nullptr;
  }

  Check& add(std::string name, Verdict v, std::string detail = {}, std::vector<std::string> witnesses = {}) {
    checks.push_back(Check{std::move(name), v, std::move(detail), std::move(witnesses), 0});
    return checks.back();
  }

  void absorb(const Report& other, const std::string& prefix) {
    for (auto c : other.checks) {
      c.name = prefix.empty() ? c.name : prefix + "." + c.name;
      checks.push_back(std::move(c));
    }
  }
};

// Runs f(report) and charges the elapsed wall time to the checks it appended.
template <class F>
void timed(Report& r, F&& f) {
  std::size_t before = r.checks.size();
  auto t0 = std::chrono::steady_clock::now();
  f(r);
  double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::size_t added = r.checks.size() - before;
  for (std::size_t i = before; i < r.checks.size(); ++i) r.checks[i].seconds = s / static_cast<double>(added);
}

}  // namespace ppkit
