#include "shiftlab/mu.hpp"

#include <boost/multiprecision/integer.hpp>

namespace shiftlab {

namespace {

// Relative slack for rounding inside 100-digit arithmetic.
const Real& working_epsilon() {
  static const Real eps = Real("1e-90");
  return eps;
}

BigInt isqrt(const BigInt& v) { return boost::multiprecision::sqrt(v); }

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

// p_k = a_k p_{k-1} + p_{k-2}, likewise q_k.
struct ConvergentRecurrence {
  BigInt p1 = 1, q1 = 0, p2 = 0, q2 = 1;

  Convergent push(const BigInt& a) {
    Convergent c{a * p1 + p2, a * q1 + q2};
    p2 = p1;
    q2 = q1;
    p1 = c.p;
    q1 = c.q;
    return c;
  }
};

}  // namespace

Decision less_than(const Enclosure& x, const Enclosure& bound) {
  const Real slack = working_epsilon() * (abs(x.mid) + abs(bound.mid) + 1);
  if (x.upper() + slack < bound.lower()) return Decision::yes;
  if (x.lower() - slack >= bound.upper()) return Decision::no;
  return Decision::undecided;
}

Decision less_equal(const Enclosure& x, const Enclosure& bound) {
  const Real slack = working_epsilon() * (abs(x.mid) + abs(bound.mid) + 1);
  if (x.upper() + slack <= bound.lower()) return Decision::yes;
  if (x.lower() - slack > bound.upper()) return Decision::no;
  return Decision::undecided;
}

IrrationalMu IrrationalMu::quadratic(const BigInt& p, const BigInt& q, const BigInt& D, const BigInt& r) {
  if (D <= 1) throw InvalidArgument("quadratic mu needs D > 1");
  if (q == 0 || r == 0) throw InvalidArgument("quadratic mu needs q != 0 and r != 0");
  const BigInt s = isqrt(D);
  if (s * s == D) throw InvalidArgument("quadratic mu needs a non-square D");
  IrrationalMu mu;
  mu.kind_ = Kind::quadratic;
  mu.value_ = (Real(p) + Real(q) * boost::multiprecision::sqrt(Real(D))) / Real(r);
  mu.radius_ = working_epsilon() * (abs(mu.value_) + 1);
  // (p + q sqrt D)/r = (P0 + sqrt(Dn))/Q0 with Dn = D q^2.
  BigInt P0 = q > 0 ? p : BigInt(-p);
  BigInt Q0 = q > 0 ? r : BigInt(-r);
  BigInt Dn = D * q * q;
  if ((Dn - P0 * P0) % Q0 != 0) {
    const BigInt aq = boost::multiprecision::abs(Q0);
    P0 *= aq;
    Dn *= Q0 * Q0;
    Q0 *= aq;
  }
  mu.qP_ = P0;
  mu.qD_ = Dn;
  mu.qQ_ = Q0;
  mu.description_ = "(" + p.str() + " + " + q.str() + "*sqrt(" + D.str() + "))/" + r.str();
  return mu;
}

IrrationalMu IrrationalMu::decimal(const std::string& literal, std::optional<Real> error_bound) {
  IrrationalMu mu;
  mu.kind_ = Kind::decimal;
  const Rational exact = parse_rational(literal);
  mu.value_ = to_real(exact);
  if (error_bound) {
    if (*error_bound < 0) throw InvalidArgument("decimal mu error bound must be nonnegative");
    mu.radius_ = *error_bound;
  } else {
    std::size_t frac_digits = 0;
    if (auto dot = literal.find('.'); dot != std::string::npos) {
      std::size_t end = literal.find_first_of("eE", dot);
      frac_digits = (end == std::string::npos ? literal.size() : end) - dot - 1;
    }
    mu.radius_ = pow(Real(10), -static_cast<int>(frac_digits));
  }
  mu.radius_ += working_epsilon() * (abs(mu.value_) + 1);
  mu.rational_ = std::nullopt;
  mu.qP_ = boost::multiprecision::numerator(exact);
  mu.qQ_ = boost::multiprecision::denominator(exact);
  mu.description_ = literal;
  return mu;
}

IrrationalMu IrrationalMu::rational(const Rational& value) {
  IrrationalMu mu;
  mu.kind_ = Kind::rational;
  mu.value_ = to_real(value);
  mu.radius_ = working_epsilon() * (abs(mu.value_) + 1);
  mu.rational_ = value;
  mu.description_ = to_string(value);
  return mu;
}

Enclosure IrrationalMu::power(unsigned k) const {
  // |(m+e)^k - m^k| <= k (|m| + r)^{k-1} r
  Enclosure out;
  out.mid = pow(value_, k);
  if (k > 0) out.rad = Real(k) * pow(abs(value_) + radius_, k - 1) * radius_;
  out.rad += working_epsilon() * (abs(out.mid) + 1);
  return out;
}

std::vector<BigInt> IrrationalMu::partial_quotients(std::size_t count) const {
  if (kind_ != Kind::quadratic) throw InvalidArgument("partial_quotients needs a quadratic mu");
  std::vector<BigInt> out;
  BigInt P = qP_, Q = qQ_;
  const BigInt s = isqrt(qD_);
  for (std::size_t i = 0; i < count; ++i) {
    // a = floor((P + sqrt(Dn)) / Q), using sqrt irrational.
    BigInt a;
    if (Q > 0) {
      a = floor_div(P + s, Q);
    } else {
      a = -floor_div(P + s, -Q) - 1;
    }
    out.push_back(a);
    P = a * Q - P;
    Q = (qD_ - P * P) / Q;
  }
  return out;
}

std::vector<Convergent> rational_convergents(const Rational& x, std::size_t count) {
  std::vector<Convergent> out;
  ConvergentRecurrence rec;
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  while (out.size() < count && den != 0) {
    const BigInt a = floor_div(num, den);
    out.push_back(rec.push(a));
    BigInt rem = num - a * den;
    num = den;
    den = rem;
  }
  return out;
}

std::vector<Convergent> real_convergents(const Real& x, std::size_t count) {
  std::vector<Convergent> out;
  ConvergentRecurrence rec;
  const Real tiny("1e-80");
  Real y = x;
  for (std::size_t i = 0; i < count; ++i) {
    const BigInt a = floor_to_int(y);
    out.push_back(rec.push(a));
    const Real frac = y - Real(a);
    // Denominators beyond ~10^40 outrun the working precision.
    if (frac < tiny || Real(out.back().q) * Real(out.back().q) > Real("1e80")) break;
    y = 1 / frac;
  }
  return out;
}

std::vector<Convergent> IrrationalMu::convergents(std::size_t count) const {
  switch (kind_) {
    case Kind::rational:
      return rational_convergents(*rational_, count);
    case Kind::decimal: {
      auto all = rational_convergents(Rational(qP_, qQ_), count);
      std::vector<Convergent> out;
      for (auto& c : all) {
        // keep only convergents certified by |mu - literal| << 1/(2 q^2)
        if (Real(4) * Real(c.q) * Real(c.q) * radius_ >= 1) break;
        out.push_back(std::move(c));
      }
      return out;
    }
    case Kind::quadratic: {
      std::vector<Convergent> out;
      ConvergentRecurrence rec;
      for (const auto& a : partial_quotients(count)) out.push_back(rec.push(a));
      return out;
    }
  }
  return {};
}

}  // namespace shiftlab
