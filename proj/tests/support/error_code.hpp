#pragma once

#include <doctest.h>

#include "sqq/errors.hpp"

/// Runs fn and returns the code of the sqq::Error it throws; fails the test if none is thrown.
template <class Fn>
sqq::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const sqq::Error& e) {
    return e.code();
  }
  FAIL("expected an sqq::Error");
  return sqq::ErrorCode::invalid_argument;
}
