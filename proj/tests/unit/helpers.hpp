#pragma once

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ivdep/error.hpp"
#include "ivdep/numeric.hpp"

namespace ivdep::test {

inline Rational R(long n, long d = 1) { return make_rational(n, d); }

inline std::vector<Rational> px2(const Rational& p0) { return {p0, Rational(1 - p0)}; }

inline std::vector<Rational> uniform_px(int m) { return std::vector<Rational>(static_cast<std::size_t>(m), R(1, m)); }

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an ivdep::Error");
  return ErrorCode::invalid_argument;
}

}  // namespace ivdep::test
