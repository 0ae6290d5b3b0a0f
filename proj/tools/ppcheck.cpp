#include <CLI11.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "ppkit/cli/render.hpp"

using namespace ppkit;
using namespace ppkit::cli;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioResult run_file(const std::string& path, const SampleOverride& ov, const std::set<std::string>& which) {
  std::string text;
  try {
    text = slurp(path);
  } catch (const std::exception& e) {
    ScenarioResult r;
    r.file = path;
    r.error = e.what();
    r.outcome = Outcome::Error;
    return r;
  }
  return run_scenario_text(path, text, ov, which);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ppcheck: exact checks for poly-Poisson scenarios"};
  app.require_subcommand(1);
  auto* check = app.add_subcommand("check", "run the suites of one or more scenario files");

  std::vector<std::string> files;
  std::string suite = "all";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<long> box;
  std::string format = "text";
  std::string out_path;
  bool timings = false;

  check->add_option("files", files, "scenario files")->required();
  check->add_option("--suite", suite, "all, or a comma-separated list of suite names");
  check->add_option("--seed", seed, "sampling seed");
  check->add_option("--samples", samples, "sample points per check");
  check->add_option("--box", box, "sample coordinates lie in [-B, B]");
  check->add_option("--format", format, "text or structured")->check(CLI::IsMember({"text", "structured"}));
  check->add_option("--out", out_path, "write the report here instead of stdout");
  check->add_flag("--timings", timings, "include wall time per check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::set<std::string> which;
  if (suite != "all") {
    std::stringstream ss(suite);
    for (std::string s; std::getline(ss, s, ',');)
      if (!s.empty()) which.insert(s);
    if (which.empty()) {
      std::cerr << "ppcheck: --suite needs at least one name\n";
      return 2;
    }
  }

  SampleOverride ov{seed, samples, box};
  if (samples && *samples == 0) {
    std::cerr << "ppcheck: --samples must be positive\n";
    return 2;
  }
  if (box && *box <= 0) {
    std::cerr << "ppcheck: --box must be positive\n";
    return 2;
  }

  std::vector<std::future<ScenarioResult>> jobs;
  for (const auto& f : files) jobs.push_back(std::async(std::launch::async, run_file, f, ov, which));
  std::vector<ScenarioResult> results;
  for (auto& j : jobs) results.push_back(j.get());

  // suite names that no scenario knows are a usage error
  for (const auto& name : which) {
    bool known = false;
    for (const auto& r : results)
      if (r.scenario)
        for (const auto& s : suite_names(*r.scenario)) known = known || s == name;
    if (!known) {
      std::cerr << "ppcheck: unknown suite '" << name << "'\n";
      return 2;
    }
  }

  RenderOptions opt{timings};
  std::string doc = format == "structured" ? render_structured(results, opt) : render_text(results, opt);
  if (out_path.empty()) {
    std::cout << doc;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::cerr << "ppcheck: cannot write " << out_path << "\n";
      return 2;
    }
    out << doc;
  }
  return exit_code(results);
}
