/**
 * @file errors.hpp
 * @brief Error type shared by every sqq module.
 */
#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sqq {

enum class ErrorCode {
  invalid_argument,
  conditioning_limit,
  invalid_interval,
  singularity,
  nonpositive_radicand,
  degenerate_update,
  non_convergence,
  non_finite,
  step_failure,
  data_load,
};

const char* to_string(ErrorCode code);

/// Compact "%.*g" rendering for error messages (std::to_string prints fixed 6 decimals).
std::string format_number(double v, int precision = 6);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when an iterative solve exhausts its iteration budget.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, Eigen::VectorXd best_iterate,
                      double residual_norm, int iterations)
      : Error(ErrorCode::non_convergence, what),
        best_iterate(std::move(best_iterate)),
        residual_norm(residual_norm),
        iterations(iterations) {}

  Eigen::VectorXd best_iterate;
  double residual_norm;
  int iterations;
};

/// A trajectory step that could not be completed; carries where it happened.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, long step_index, double time, ErrorCode cause)
      : Error(ErrorCode::step_failure, what),
        step_index(step_index),
        time(time),
        cause(cause) {}

  long step_index;
  double time;
  ErrorCode cause;
};

}  // namespace sqq
