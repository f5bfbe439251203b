#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <string>
#include <string_view>

#include "ordcover/errors.hpp"

namespace ordcover {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational make_rational(long long p, long long q = 1) {
  if (q == 0) throw argument_error("zero denominator");
  return Rational(Integer(p), Integer(q));
}

/// Largest integer <= r.
inline Integer floor_int(const Rational& r) {
  const Integer num = boost::multiprecision::numerator(r);
  const Integer den = boost::multiprecision::denominator(r);
  if (num >= 0) return num / den;
  return -((-num + den - 1) / den);
}

inline Rational floor_rational(const Rational& r) { return Rational(floor_int(r)); }

/// r - floor(r), in [0, 1).
inline Rational frac(const Rational& r) { return r - floor_rational(r); }

/// "p/q", or "p" for integers.
inline std::string to_string(const Rational& r) { return r.str(); }

inline Rational parse_rational(std::string_view text) {
  auto parse_integer = [&](std::string_view s) -> Integer {
    if (s.empty()) throw parse_error("empty rational component in '" + std::string(text) + "'");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw parse_error("malformed rational '" + std::string(text) + "'");
    for (std::size_t j = i; j < s.size(); ++j) {
      if (s[j] < '0' || s[j] > '9') throw parse_error("malformed rational '" + std::string(text) + "'");
    }
    return Integer(std::string(s[0] == '+' ? s.substr(1) : s));
  };
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_integer(text));
  const Integer den = parse_integer(text.substr(slash + 1));
  if (den == 0) throw parse_error("zero denominator in '" + std::string(text) + "'");
  return Rational(parse_integer(text.substr(0, slash)), den);
}

/// Exact value of a finite double.
inline Rational from_double(double x) {
  if (!std::isfinite(x)) throw argument_error("non-finite value has no rational form");
  return Rational(x);
}

inline double to_double_nearest(const Rational& r) { return r.convert_to<double>(); }

/// Largest double <= r.
inline double to_double_down(const Rational& r) {
  double d = r.convert_to<double>();
  while (Rational(d) > r) d = std::nextafter(d, -HUGE_VAL);
  return d;
}

/// Smallest double >= r.
inline double to_double_up(const Rational& r) {
  double d = r.convert_to<double>();
  while (Rational(d) < r) d = std::nextafter(d, HUGE_VAL);
  return d;
}

/// Bit length of the denominator; used to cap exact iteration.
inline unsigned denominator_bits(const Rational& r) {
  return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::denominator(r))) + 1;
}

inline unsigned numerator_bits(const Rational& r) {
  const Integer num = boost::multiprecision::numerator(r);
  if (num == 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(boost::multiprecision::abs(num))) + 1;
}

}  // namespace ordcover
