#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace smexp {

// Exact arbitrary-precision rational, the coefficient scalar everywhere.
// Stored in lowest terms with a positive denominator.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.template convert_to<double>(); }

inline Rational rat_abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// base^exp for integer exp; negative exponents require a nonzero base.
inline Rational rat_pow(const Rational& base, long exp) {
  if (exp == 0) return Rational(1);
  if (base == 0) {
    if (exp < 0) throw std::domain_error("rat_pow: zero base with negative exponent");
    return Rational(0);
  }
  unsigned long n = exp < 0 ? static_cast<unsigned long>(-(exp + 1)) + 1ul
                            : static_cast<unsigned long>(exp);
  Rational acc(1);
  Rational b = base;
  while (n != 0) {
    if (n & 1ul) acc *= b;
    b *= b;
    n >>= 1;
  }
  if (exp < 0) acc = Rational(1) / acc;
  return acc;
}

// Accepts "p" or "p/q" with optional sign; q must be nonzero.
inline Rational parse_rational(std::string_view text) {
  auto parse_int = [&](std::string_view part) -> BigInt {
    if (part.empty())
      throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    try {
      return BigInt(std::string(part));
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
    }
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  BigInt num = parse_int(text.substr(0, slash));
  BigInt den = parse_int(text.substr(slash + 1));
  if (den == 0)
    throw std::invalid_argument("malformed rational: zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

// "p" when the denominator is 1, otherwise "p/q". Round-trips exactly.
inline std::string to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += '/';
    s += denominator(r).str();
  }
  return s;
}

}  // namespace smexp
