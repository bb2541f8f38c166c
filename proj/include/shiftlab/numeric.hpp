#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shiftlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
// 100 significant decimal digits; every "high-precision real" in the library.
using Real = boost::multiprecision::cpp_bin_float_100;

using i128 = __int128;
using u128 = unsigned __int128;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed arguments violating an operation's precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Work estimate exceeds a configured budget or hard search cap.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

// Malformed input document; message carries a location tag.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Exact parse of "p", "p/q", "-1.25", "3e-9", "1.5E+2" into a rational.
Rational parse_rational(std::string_view text);
BigInt parse_integer(std::string_view text);

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

inline Real to_real(const Rational& q) {
  return Real(boost::multiprecision::numerator(q)) /
         Real(boost::multiprecision::denominator(q));
}

inline double to_double(const Rational& q) {
  return static_cast<double>(to_real(q));
}

inline double to_double(const Real& x) { return static_cast<double>(x); }

std::string to_string(const Rational& q);
std::string to_string(const Real& x, int digits = 30);

BigInt binomial(unsigned n, unsigned k);
BigInt factorial(unsigned n);

BigInt gcd(const BigInt& a, const BigInt& b);
// gcd of a list, 0 for an empty or all-zero list.
BigInt gcd_of(const std::vector<BigInt>& values);

BigInt round_nearest(const Real& x);
BigInt floor_to_int(const Real& x);

// Unit roundoff of IEEE double.
inline constexpr double kUnitRoundoff = 0x1p-53;

}  // namespace shiftlab
