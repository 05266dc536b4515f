/**
 * @file solver.hpp
 * @brief Newton (finite-difference Jacobian) and Broyden quasi-Newton solvers for F(x) = 0.
 */
#pragma once

#include <functional>

#include <Eigen/Dense>

#include "sqq/basis.hpp"

namespace sqq {

enum class SolverMethod { newton_fd, broyden };

const char* to_string(SolverMethod method);

struct SolverConfig {
  SolverMethod method = SolverMethod::broyden;
  double epsilon = 1e-12;  // relative step threshold
  int k_max = 50;
  double fd_step = 1e-7;
  double denom_guard = 1e-14;
  /// Broyden: iterations without a decrease of the relative step before a fresh FD Jacobian.
  int stall_window = 5;
  /// Roundoff floor: accept once the smallest relative step seen is within
  /// noise_floor_factor * epsilon and has not improved for noise_floor_window iterations.
  double noise_floor_factor = 100.0;
  int noise_floor_window = 3;

  void validate() const;
};

struct SolverState {
  Vec x;
  Mat J_inv;
  int iterations = 0;
  bool converged = false;
  double relative_error = 0.0;
  double residual_norm = 0.0;  // ||F|| at the last evaluated iterate
  long residual_evaluations = 0;
  int jacobian_builds = 0;
  bool noise_floor = false;  // converged by the roundoff-floor rule rather than epsilon
};

/// F(x, out) writes the residual into out.
using ResidualFn = std::function<void(const Vec&, Vec&)>;

/// Called after every Broyden update with the updated inverse and the secant pair (s, y).
using UpdateObserver = std::function<void(const Mat& J_inv, const Vec& s, const Vec& y)>;

/// Central-difference Jacobian, column j = [F(x + h e_j) - F(x - h e_j)] / (2h).
Mat fd_jacobian(const ResidualFn& F, const Vec& x, double h, long* evaluations = nullptr);

/// Inverse Broyden update J_inv + (s - J_inv y)(s^T J_inv) / (s^T J_inv y).
/// Throws degenerate_update when |s^T J_inv y| <= guard |s| |y|.
Mat broyden_update(const Mat& J_inv, const Vec& s, const Vec& y, double guard);
void broyden_update_in_place(Mat& J_inv, const Vec& s, const Vec& y, double guard);

/// Iterates x <- x - J^-1 F(x) until |x_{k+1} - x_k| / |x_k| <= epsilon.
///
/// Broyden: J_inv0 seeds the inverse (an empty matrix triggers an FD build) and is updated
/// every iteration; the final inverse is returned for warm-starting the next solve.
/// Newton: the FD Jacobian is rebuilt and factorised every iteration; J_inv0 is ignored and
/// the returned J_inv is empty.
///
/// Each iteration evaluates F once (plus 2 len(x) evaluations for an FD Jacobian).
/// Throws NonConvergenceError at k_max and Error(non_finite) on NaN/Inf.
SolverState solve(const ResidualFn& F, const Vec& x0, const Mat& J_inv0, const SolverConfig& cfg,
                  const UpdateObserver& on_update = {});

}  // namespace sqq
