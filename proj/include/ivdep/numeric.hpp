#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace ivdep {

using Rational = mpq_class;

enum class NumericMode { exact, floating };

/// Parses "3", "-1/3", "0.25", "1.5e-3" exactly. Throws Error(malformed_input).
Rational parse_rational(std::string_view text);

/// Exact decimal expansion of a finite double (shortest round-trip form).
Rational rational_from_double(double value);

/// Nearest double (ties to even). mpq_class::get_d truncates instead.
double to_nearest_double(const Rational& value);

/// n/d in canonical form. mpq_class(n, d) alone does not canonicalize.
Rational make_rational(long numerator, long denominator);

/// "p/q" or "p" for integers.
std::string to_string(const Rational& value);

/// Arithmetic policy for the two supported scalar fields. `tolerance` is the
/// slack used by validation and comparisons; it is zero for rationals.
template <class T>
struct Num;

template <>
struct Num<double> {
  static constexpr double tolerance = 1e-9;
  static double from_rational(const Rational& r) { return to_nearest_double(r); }
  static double to_double(double v) { return v; }
  static double parse(std::string_view text) { return to_nearest_double(parse_rational(text)); }
  static std::string str(double v);
  static double abs(double v) { return std::fabs(v); }
  static bool is_zero(double v, double tol = tolerance) { return std::fabs(v) <= tol; }
  static bool equal(double a, double b, double tol = tolerance) { return std::fabs(a - b) <= tol; }
};

template <>
struct Num<Rational> {
  static inline const Rational tolerance{0};
  static Rational from_rational(const Rational& r) { return r; }
  static double to_double(const Rational& v) { return to_nearest_double(v); }
  static Rational parse(std::string_view text) { return parse_rational(text); }
  static std::string str(const Rational& v) { return to_string(v); }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static bool is_zero(const Rational& v, const Rational& = Rational{0}) { return sgn(v) == 0; }
  static bool equal(const Rational& a, const Rational& b, const Rational& = Rational{0}) {
    return a == b;
  }
};

template <class T>
T sum(const std::vector<T>& values) {
  T total{0};
  for (const auto& v : values) total += v;
  return total;
}

template <class To, class From>
std::vector<To> convert_vector(const std::vector<From>& in) {
  std::vector<To> out;
  out.reserve(in.size());
  for (const auto& v : in) {
    if constexpr (std::is_same_v<To, double>) {
      if constexpr (std::is_same_v<From, double>) {
        out.push_back(v);
      } else {
        out.push_back(Num<From>::to_double(v));
      }
    } else if constexpr (std::is_same_v<From, double>) {
      out.push_back(rational_from_double(v));
    } else {
      out.push_back(To(v));
    }
  }
  return out;
}

}  // namespace ivdep
