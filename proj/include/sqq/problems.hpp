/**
 * @file problems.hpp
 * @brief Benchmark problems: Kepler, the periodic three-body orbit, and the outer Solar System.
 */
#pragma once

#include <memory>
#include <string>

#include "sqq/forces.hpp"

namespace sqq {

struct ProblemSpec {
  std::string name;
  std::shared_ptr<const HamiltonianModel> model;
  PhaseState initial;
  double period = 0.0;  // reference period for "N periods" durations
  std::string units;
  double H0 = 0.0;
  Vec linear_momentum;   // total, one entry per space dimension
  Vec angular_momentum;  // total; one entry in 2-D (z), three in 3-D
  std::string source;    // provenance for file-backed problems

  /// Non-null when the model is an NBodySystem.
  const NBodySystem* nbody() const { return dynamic_cast<const NBodySystem*>(model.get()); }
  int space_dim() const;
};

/// Unit-mass Kepler problem, period 2 pi.
ProblemSpec kepler_problem(double e);

/// Periodic planar three-body orbit with masses (0.9, 0.85, 1), G = 1, period 6.3509.
ProblemSpec three_body_problem();

/// Sun plus the five outer bodies, loaded from the bundled JSON data file. The reference
/// period is the osculating two-body period of Jupiter about the Sun at the initial epoch.
ProblemSpec outer_solar_problem(const std::string& path = "");

/// Path of the bundled outer Solar System file.
std::string default_outer_solar_path();

/// Loads any file in the N-body JSON schema (name, bodies, grav_const, units, source,
/// checksum). Throws data_load on a missing file, a schema violation, or a bad checksum.
ProblemSpec load_nbody_problem(const std::string& path);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a64_hex(const std::string& bytes);

/// sum_i p_i for bodies of dimension space_dim.
Vec total_linear_momentum(int space_dim, const VecRef& p);
/// sum_i q_i x p_i; a single z component in 2-D.
Vec total_angular_momentum(int space_dim, const VecRef& q, const VecRef& p);

/// Looks up a problem by CLI name: "kepler" (uses e), "three-body", "outer-solar".
ProblemSpec make_problem(const std::string& name, double e = 0.5, const std::string& data_file = "");

}  // namespace sqq
