#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqq/cli.hpp"
#include "sqq/trajectory_io.hpp"

using namespace sqq;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome sqq_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sqq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = parse_and_run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run: documented Kepler invocation") {
  const fs::path out = fs::temp_directory_path() / "sqq_cli_k.csv";
  fs::remove(out);
  const Outcome r = sqq_cli({"run", "--problem", "kepler", "--e", "0.5", "--variant", "SQQ-P", "--m", "9", "--n", "9",
                             "--dt", "0.4", "--duration", "500periods", "--out", out.string(), "--sample-every", "50"});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(out));
  CHECK(r.out.find("angular_momentum_drift=") != std::string::npos);
  const Trajectory tr = read_trajectory_csv(out.string());
  CHECK(tr.samples.back().t == doctest::Approx(1000.0 * 3.141592653589793).epsilon(1e-14));
}

TEST_CASE("run: identical invocations write identical files") {
  const fs::path a = fs::temp_directory_path() / "sqq_cli_a.csv";
  const fs::path b = fs::temp_directory_path() / "sqq_cli_b.csv";
  const fs::path sa = fs::temp_directory_path() / "sqq_cli_a.json";
  for (const fs::path& p : {a, b}) {
    const Outcome r = sqq_cli({"run", "--problem", "three-body", "--variant", "SQQ-PTQ", "--dtau", "0.01",
                               "--duration", "0.1periods", "--out", p.string(), "--summary", sa.string()});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("closest_approach=") != std::string::npos);
  }
  CHECK(slurp(a) == slurp(b));
  const nlohmann::json summary = nlohmann::json::parse(slurp(sa));
  CHECK(summary.contains("max_abs_energy_error"));
  CHECK(summary["config"]["problem"] == "three-body");
}

TEST_CASE("run: config file with flag overrides") {
  const fs::path cfg = fs::temp_directory_path() / "sqq_cli_cfg.json";
  std::ofstream(cfg) << R"({"problem": "kepler", "e": 0.3, "variant": "SQQ-PQ", "m": 4, "n": 4, "step": 0.25,
                           "duration": "0.5periods"})";
  const Outcome r = sqq_cli({"run", "--config", cfg.string(), "--m", "5"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("SQQ-PQ") != std::string::npos);
}

TEST_CASE("usage errors exit 1") {
  const Outcome e15 = sqq_cli({"run", "--problem", "kepler", "--e", "1.5"});
  CHECK(e15.code == kExitUsage);
  CHECK(e15.err.find("--e") != std::string::npos);

  const Outcome conflict = sqq_cli({"run", "--variant", "SQQ", "--node-kind", "chebyshev", "--dt", "0.1"});
  CHECK(conflict.code == kExitUsage);
  CHECK(conflict.err.find("--variant SQQ") != std::string::npos);
  CHECK(conflict.err.find("--node-kind chebyshev") != std::string::npos);

  CHECK(sqq_cli({"run", "--bogus"}).code == kExitUsage);
  CHECK(sqq_cli({}).code == kExitUsage);
  CHECK(sqq_cli({"run", "--dt", "0.1", "--dtau", "0.1"}).code == kExitUsage);
  const Outcome clock = sqq_cli({"run", "--variant", "SQQ-PTQ", "--dt", "0.1"});
  CHECK(clock.code == kExitUsage);
  CHECK(clock.err.find("--dtau") != std::string::npos);
  CHECK(sqq_cli({"run", "--config", "/nonexistent/x.json"}).code == kExitUsage);
  CHECK(sqq_cli({"bench", "--suite", "no-such-suite"}).code == kExitUsage);
  CHECK(sqq_cli({"validate", "--check", "nonsense"}).code == kExitUsage);
  CHECK(sqq_cli({"run", "--help"}).code == kExitOk);
}

TEST_CASE("numerical failures exit 2 with the step and time") {
  const Outcome r = sqq_cli({"run", "--problem", "kepler", "--variant", "SQQ-PTQ", "--dtau", "0.01", "--k-max", "1",
                             "--duration", "1"});
  CHECK(r.code == kExitNumerical);
  CHECK(r.err.find("step 1 at t = 0") != std::string::npos);
}

TEST_CASE("compare") {
  const fs::path rep = fs::temp_directory_path() / "sqq_cli_cmp.json";
  const Outcome r = sqq_cli({"compare", "--problem", "kepler", "--variant-a", "SQQ-PN", "--variant-b", "SQQ-PQ",
                             "--m", "6", "--n", "6", "--dt", "0.2", "--duration", "1periods", "--out", rep.string()});
  CHECK(r.code == kExitOk);
  const nlohmann::json j = nlohmann::json::parse(slurp(rep));
  CHECK(j["aligned_samples"].get<long>() > 10);
  CHECK(j["max_q_difference"].get<double>() < 1e-9);
}

TEST_CASE("bench writes tables") {
  const fs::path dir = fs::temp_directory_path() / "sqq_cli_bench";
  fs::remove_all(dir);
  const fs::path suite = fs::temp_directory_path() / "sqq_cli_suite.json";
  std::ofstream(suite) << R"({"name": "mini", "tables": [{"name": "t", "title": "Mini", "cells": [
      {"label": "P", "config": {"problem": "kepler", "variant": "SQQ-P", "m": 5, "n": 5, "step": 0.2,
                                "duration": "0.2periods"}}]}]})";
  const Outcome r = sqq_cli({"bench", "--suite", suite.string(), "--out", dir.string(), "--workers", "2"});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(dir / "t.csv"));
  CHECK(fs::exists(dir / "t.txt"));
  CHECK(fs::exists(dir / "t.wall.csv"));
  CHECK(r.out.find("Mini") != std::string::npos);
}

TEST_CASE("validate subset") {
  const Outcome r = sqq_cli({"validate", "--check", "projection"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PASS projection") != std::string::npos);
}
