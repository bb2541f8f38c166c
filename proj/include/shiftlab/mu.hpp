#pragma once

#include "shiftlab/numeric.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace shiftlab {

// A real number known to lie in [mid - rad, mid + rad].
struct Enclosure {
  Real mid = 0;
  Real rad = 0;

  Real lower() const { return mid - rad; }
  Real upper() const { return mid + rad; }
};

enum class Decision { yes, no, undecided };

// Rigorous "x < bound" / "x <= bound" for enclosures: undecided when the
// enclosures overlap the boundary.
Decision less_than(const Enclosure& x, const Enclosure& bound);
Decision less_equal(const Enclosure& x, const Enclosure& bound);

struct Convergent {
  BigInt p;
  BigInt q;
};

// The shift parameter mu. The quadratic kind (p + q sqrt(D)) / r is exact and
// has exact continued-fraction convergents; a decimal literal carries its own
// error bound; the rational kind exists for test instances.
class IrrationalMu {
 public:
  enum class Kind { quadratic, decimal, rational };

  static IrrationalMu quadratic(const BigInt& p, const BigInt& q, const BigInt& D, const BigInt& r);
  static IrrationalMu sqrt_of(const BigInt& D) { return quadratic(0, 1, D, 1); }
  // Default error bound is one unit in the last written digit, which covers
  // truncated as well as rounded literals.
  static IrrationalMu decimal(const std::string& literal, std::optional<Real> error_bound = std::nullopt);
  static IrrationalMu rational(const Rational& value);

  Kind kind() const { return kind_; }
  const Real& value() const { return value_; }
  // |mu - value()| <= radius().
  const Real& radius() const { return radius_; }
  Enclosure enclosure() const { return {value_, radius_}; }
  std::optional<Rational> exact_rational() const { return rational_; }
  std::string describe() const { return description_; }

  // Enclosure of mu^k.
  Enclosure power(unsigned k) const;

  // Up to `count` convergents. Quadratic: exact integer recurrence. Decimal:
  // convergents of the literal, stopping once 1/q^2 no longer dominates the
  // literal's error. Rational: the finite expansion.
  std::vector<Convergent> convergents(std::size_t count) const;

  // Partial quotients of the quadratic kind (exact).
  std::vector<BigInt> partial_quotients(std::size_t count) const;

 private:
  Kind kind_ = Kind::rational;
  Real value_ = 0;
  Real radius_ = 0;
  std::optional<Rational> rational_;
  // Quadratic data in the normalised form (P0 + sqrt(Dn)) / Q0 with Q0 | Dn - P0^2.
  BigInt qP_ = 0, qD_ = 0, qQ_ = 1;
  std::string description_;
};

// Continued-fraction convergents of a real given to high precision; stops
// when the expansion is no longer trustworthy at the working precision.
std::vector<Convergent> real_convergents(const Real& x, std::size_t count);
std::vector<Convergent> rational_convergents(const Rational& x, std::size_t count);

}  // namespace shiftlab
