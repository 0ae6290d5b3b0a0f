#pragma once

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ppkit/cli/runner.hpp"

namespace ppkit::cli {

inline constexpr int kReportVersion = 1;

struct RenderOptions {
  bool timings = false;
};

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::AsExpected: return "as_expected";
    case Outcome::Unexpected: return "unexpected";
    case Outcome::Error: return "error";
  }
  return "error";
}

inline std::string render_structured(const std::vector<ScenarioResult>& results, const RenderOptions& opt = {}) {
  using OJ = nlohmann::ordered_json;
  OJ doc;
  doc["format"] = "ppcheck-report";
  doc["version"] = kReportVersion;
  OJ arr = OJ::array();
  std::size_t unexpected = 0, errors = 0;
  for (const auto& r : results) {
    OJ s;
    s["file"] = r.file;
    if (!r.scenario) {
      s["outcome"] = outcome_name(r.outcome);
      s["error"] = r.error;
      ++errors;
      arr.push_back(s);
      continue;
    }
    const Scenario& sc = *r.scenario;
    s["name"] = sc.name;
    s["kind"] = sc.kind;
    s["conventions"] = OJ(sc.conventions);
    s["sample"] = {{"seed", sc.sample.seed}, {"count", sc.sample.count}, {"box", sc.sample.box}};
    s["outcome"] = outcome_name(r.outcome);
    OJ checks = OJ::array();
    for (const auto& o : r.checks) {
      OJ c;
      c["name"] = o.check->name;
      c["verdict"] = verdict_name(o.check->verdict);
      c["expected"] = verdict_name(o.expected);
      c["as_expected"] = o.as_expected;
      c["detail"] = o.check->detail;
      c["witnesses"] = o.check->witnesses;
      if (opt.timings) c["seconds"] = o.check->seconds;
      checks.push_back(c);
    }
    s["checks"] = checks;
    s["missing_expected"] = r.missing;
    if (r.outcome == Outcome::Unexpected) ++unexpected;
    if (r.outcome == Outcome::Error) ++errors;
    arr.push_back(s);
  }
  doc["scenarios"] = arr;
  doc["summary"] = {{"scenarios", results.size()}, {"unexpected", unexpected}, {"errors", errors}, {"exit", exit_code(results)}};
  return doc.dump(2) + "\n";
}

inline std::string render_text(const std::vector<ScenarioResult>& results, const RenderOptions& opt = {}) {
  std::ostringstream out;
  for (const auto& r : results) {
    if (!r.scenario) {
      out << "scenario " << r.file << ": parse error\n  " << r.error << "\n\n";
      continue;
    }
    const Scenario& sc = *r.scenario;
    out << "scenario " << sc.name << " (" << sc.kind << ", n=" << sc.n << ", k=" << sc.k << ", seed " << sc.sample.seed << ")\n";
    for (const auto& o : r.checks) {
      const Check& c = *o.check;
      out << "  " << verdict_name(c.verdict);
      if (c.verdict != Verdict::Pass && o.as_expected) out << " (expected)";
      if (!o.as_expected) out << " (expected " << verdict_name(o.expected) << ")";
      out << "  " << c.name;
      if (!c.detail.empty()) out << ": " << c.detail;
      if (opt.timings) {
        char buf[32];
        std::snprintf(buf, sizeof buf, " [%.3fs]", c.seconds);
        out << buf;
      }
      out << "\n";
      if (c.verdict != Verdict::Pass)
        for (const auto& w : c.witnesses) out << "      witness: " << w << "\n";
    }
    for (const auto& m : r.missing) out << "  missing expected check " << m << "\n";
    out << "  outcome: " << outcome_name(r.outcome) << "\n\n";
  }
  out << "exit " << exit_code(results) << "\n";
  return out.str();
}

// Verdict vector (check name, verdict) per scenario, read back from a structured report.
inline std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> verdicts_from_structured(
    const std::string& doc) {
  auto j = nlohmann::json::parse(doc);
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> out;
  for (const auto& s : j.at("scenarios")) {
    std::vector<std::pair<std::string, std::string>> v;
    if (s.contains("checks"))
      for (const auto& c : s["checks"]) v.emplace_back(c["name"].get<std::string>(), c["verdict"].get<std::string>());
    out.emplace_back(s.contains("name") ? s["name"].get<std::string>() : s["file"].get<std::string>(), v);
  }
  return out;
}

inline std::string verdict_vector(const Report& rep) {
  std::string s;
  for (const auto& c : rep.checks) s += c.name + " " + verdict_name(c.verdict) + "\n";
  return s;
}

}  // namespace ppkit::cli
