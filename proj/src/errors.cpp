#include "sqq/errors.hpp"

#include <cstdio>

namespace sqq {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return "invalid-argument";
    case ErrorCode::conditioning_limit:
      return "conditioning-limit";
    case ErrorCode::invalid_interval:
      return "invalid-interval";
    case ErrorCode::singularity:
      return "singularity";
    case ErrorCode::nonpositive_radicand:
      return "nonpositive-radicand";
    case ErrorCode::degenerate_update:
      return "degenerate-update";
    case ErrorCode::non_convergence:
      return "non-convergence";
    case ErrorCode::non_finite:
      return "non-finite";
    case ErrorCode::step_failure:
      return "step-failure";
    case ErrorCode::data_load:
      return "data-load";
  }
  return "unknown";
}

std::string format_number(double v, int precision) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

}  // namespace sqq
