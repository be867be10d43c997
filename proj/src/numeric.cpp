#include "ivdep/numeric.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "ivdep/error.hpp"

namespace ivdep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::malformed_input: return "malformed_input";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::invalid_distribution: return "invalid_distribution";
    case ErrorCode::division_by_zero: return "division_by_zero";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::infeasible: return "infeasible";
    case ErrorCode::numerical_failure: return "numerical_failure";
    case ErrorCode::unsupported: return "unsupported";
  }
  return "unknown";
}

namespace {

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorCode::malformed_input, "not a number: '" + std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

mpz_class ten_pow(long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, static_cast<unsigned long>(e));
  return r;
}

// Decimal literal: [+-]digits[.digits][(e|E)[+-]digits]
Rational parse_decimal(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto epos = s.find_first_of("eE"); epos != std::string_view::npos) {
    std::string_view exp = s.substr(epos + 1);
    s = s.substr(0, epos);
    bool exp_negative = false;
    if (!exp.empty() && (exp.front() == '+' || exp.front() == '-')) {
      exp_negative = exp.front() == '-';
      exp.remove_prefix(1);
    }
    if (!all_digits(exp) || exp.size() > 6) bad_number(text);
    exponent = std::stol(std::string(exp));
    if (exp_negative) exponent = -exponent;
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) bad_number(text);
    if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac))) bad_number(text);
    digits = std::string(whole) + std::string(frac);
    exponent -= static_cast<long>(frac.size());
  } else {
    if (!all_digits(s)) bad_number(text);
    digits = std::string(s);
  }
  mpz_class mantissa(digits, 10);
  Rational value;
  if (exponent >= 0) {
    value = Rational(mantissa * ten_pow(exponent));
  } else {
    value = Rational(mantissa, ten_pow(-exponent));
    value.canonicalize();
  }
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) bad_number(text);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (sgn(den) == 0) throw Error(ErrorCode::division_by_zero, "zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text);
}

double to_nearest_double(const Rational& value) {
  const double d = value.get_d();
  if (!std::isfinite(d)) return d;
  // get_d truncates toward zero, so the nearest double is d or its neighbour away from zero.
  const double away = std::nextafter(d, sgn(value) >= 0 ? HUGE_VAL : -HUGE_VAL);
  if (!std::isfinite(away)) return d;
  const Rational rd(d);
  const Rational ra(away);
  const Rational ed = abs(Rational(value - rd));
  const Rational ea = abs(Rational(value - ra));
  if (ea < ed) return away;
  if (ed < ea) return d;
  // Tie: prefer the even mantissa.
  int exp = 0;
  const double m = std::frexp(d, &exp);
  const auto bits = static_cast<long long>(std::ldexp(m, 53));
  return (bits % 2 == 0) ? d : away;
}

Rational make_rational(long numerator, long denominator) {
  if (denominator == 0) throw Error(ErrorCode::division_by_zero, "zero denominator");
  Rational r(numerator, denominator);
  r.canonicalize();
  return r;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::malformed_input, "non-finite value cannot be made exact");
  }
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::malformed_input, "cannot format number");
  return parse_decimal(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

std::string to_string(const Rational& value) { return value.get_str(10); }

std::string Num<double>::str(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

}  // namespace ivdep
