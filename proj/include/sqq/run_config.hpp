/**
 * @file run_config.hpp
 * @brief One fully specified simulation: problem, variant, discretisation, duration, output.
 */
#pragma once

#include <string>

#include <json.hpp>

#include "sqq/integrator.hpp"
#include "sqq/problems.hpp"

namespace sqq {

/// A physical duration, either absolute or in multiples of the problem's reference period.
struct Duration {
  double value = 1.0;
  bool in_periods = true;

  /// Accepts "<N>periods" (also "<N>period") or a plain number.
  static Duration parse(const std::string& text);
  std::string to_string() const;
  double resolve(double period) const { return in_periods ? value * period : value; }

  bool operator==(const Duration&) const = default;
};

struct RunConfig {
  std::string problem = "kepler";  // kepler | three-body | outer-solar
  double e = 0.5;                  // Kepler eccentricity
  std::string data_file;           // N-body data file; empty selects the bundled one
  std::string variant = "SQQ-PTQ";
  int m = 3;
  int n = 3;
  double step = 0.01;              // dt, or dtau for the T variants
  int gauss_points = 0;            // 0 selects m + n + 1
  Duration duration;
  std::string out;                 // trajectory CSV; empty writes nothing
  int sample_every = 1;
  std::string node_kind;           // optional assertion: "equidistant" or "chebyshev"
  bool projection = true;          // false forces the per-step Vandermonde path
  double sigma_a = 1e-6;
  double sigma_b = 1e2;
  double epsilon = 1e-12;
  int k_max = 50;

  /// Throws invalid_argument naming the offending field or flag combination.
  void validate() const;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

ProblemSpec load_problem(const RunConfig& cfg);
VariantConfig variant_config(const RunConfig& cfg);

struct RunResult {
  ProblemSpec problem;
  Trajectory trajectory;
};

/// Builds the problem and variant, integrates, and writes cfg.out when set. A step failure
/// propagates as StepFailure.
RunResult run(const RunConfig& cfg, const StepObserver& observer = {});

}  // namespace sqq
