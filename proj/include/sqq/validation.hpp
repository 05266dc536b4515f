/**
 * @file validation.hpp
 * @brief Self-checks behind `sqq validate`: residual gradients, projection equivalence,
 * symplecticity of the step map, and the Broyden secant condition.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sqq {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed value of the checked quantity
  double threshold = 0.0;  // pass when worst <= threshold
  std::string detail;
};

/// Analytic residual and outgoing momentum against central differences of the discrete
/// action, over `configs` random steps per mode on the Kepler and three-body models.
CheckResult check_residual_gradients(int configs = 50, std::uint64_t seed = 1);

/// Projected basis against a per-interval Vandermonde solve on random intervals in [0, 100].
CheckResult check_projection_equivalence(int intervals = 100, std::uint64_t seed = 2);

/// ||D^T J D - J||_inf for the finite-difference Jacobian D of one Kepler step.
CheckResult check_symplecticity(int m = 5, int n = 5, double dt = 0.1);

/// Relative violation of J_inv y = s after every Broyden update along a three-body run.
CheckResult check_broyden_secant(int steps = 2000);

/// Names accepted by run_validation: gradients, projection, symplecticity, secant.
std::vector<std::string> validation_check_names();

/// Runs the selected checks (all when `only` is empty); throws invalid_argument on an
/// unknown name.
std::vector<CheckResult> run_validation(const std::vector<std::string>& only = {},
                                        std::uint64_t seed = 1);

}  // namespace sqq
