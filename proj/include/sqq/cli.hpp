/**
 * @file cli.hpp
 * @brief The `sqq` command line: run, bench, compare, validate.
 *
 * Exit codes: 0 success, 1 usage error (bad flag, bad value, conflicting flags, unreadable
 * input), 2 numerical failure (the message names the step index and time).
 */
#pragma once

#include <iosfwd>

namespace sqq {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sqq
