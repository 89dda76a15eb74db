#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>

#include "iptree/errors.hpp"

namespace iptree {

// Exact scalar for the rational computation mode. Expression templates are
// off so Rational behaves as a plain value type in generic code.
using Rational =
    boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                  boost::multiprecision::et_off>;

// The two computation modes share all algorithms; this trait carries the
// mode-specific tolerances (0 in exact mode) and conversions.
template <class T>
struct num;

template <>
struct num<double> {
  static constexpr bool exact = false;
  static double from_ratio(long long p, long long q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double measurability_tol() { return 1e-12; }
  static double feasibility_tol() { return 1e-9; }
  static double desirability_tol() { return 1e-12; }
  static double to_double(double v) { return v; }
  static bool finite(double v) { return std::isfinite(v); }
};

template <>
struct num<Rational> {
  static constexpr bool exact = true;
  static Rational from_ratio(long long p, long long q) {
    return Rational(p) / Rational(q);
  }
  static Rational measurability_tol() { return Rational(0); }
  static Rational feasibility_tol() { return Rational(0); }
  static Rational desirability_tol() { return Rational(0); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static bool finite(const Rational&) { return true; }
};

template <class T>
bool within(const T& a, const T& b, const T& tol) {
  T d = a - b;
  if (d < T(0)) d = -d;
  return d <= tol;
}

// Shortest round-trip decimal form, "0.064" not "0.064000000000000001".
inline std::string format_value(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_value(const Rational& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Accepts "p/q", "-3", "0.25", "1e-3"-free plain decimals. Used by the
// document layer for exact fixtures.
inline Rational rational_from_string(std::string_view s) {
  auto bad = [&] { fail(Err::Parse, "not a rational literal: '" + std::string(s) + "'"); };
  if (s.empty()) bad();
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    try {
      return Rational{std::string(s)};
    } catch (const std::exception&) {
      bad();
    }
  }
  bool neg = false;
  size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  boost::multiprecision::cpp_int numer = 0, denom = 1;
  bool any_digit = false, seen_dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c == '.') {
      if (seen_dot) bad();
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      numer = numer * 10 + (c - '0');
      if (seen_dot) denom *= 10;
      any_digit = true;
    } else {
      bad();
    }
  }
  if (!any_digit) bad();
  Rational r(numer, denom);
  return neg ? -r : r;
}

}  // namespace iptree
