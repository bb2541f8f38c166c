#include "helpers.hpp"
#include "shiftlab/expsums.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace shiftlab;
using namespace testing_helpers;

namespace {

constexpr double kPi = std::numbers::pi;

Complex e_turns(const Real& t) {
  const Real frac = t - boost::multiprecision::floor(t);
  const double a = 2 * kPi * static_cast<double>(frac);
  return {std::cos(a), std::sin(a)};
}

Complex e_rational(const Rational& t) {
  const BigInt num = boost::multiprecision::numerator(t);
  const BigInt den = boost::multiprecision::denominator(t);
  BigInt m = num % den;
  if (m < 0) m += den;
  return e_turns(Real(m) / Real(den));
}

// Plain nested loop with 100-digit phases; shares nothing with the
// fixed-point engine.
Complex naive_g(const FormSystem& sys, std::int64_t P, const std::vector<Real>& alpha,
                const std::map<ExponentVector, Real>& omega_d) {
  const std::size_t n = sys.n();
  std::vector<std::int64_t> x(n, -P);
  Complex total = 0;
  while (true) {
    std::vector<Real> xr(x.begin(), x.end());
    Real ph = 0;
    for (std::size_t k = 0; k < sys.R(); ++k) ph += alpha[k] * eval_form(sys.form(k), xr);
    for (const auto& [e, w] : omega_d) {
      Real m = w;
      for (std::size_t i = 0; i < n; ++i) m *= pow(xr[i], e[i]);
      ph += m;
    }
    total += e_turns(ph);
    std::size_t pos = n;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (x[pos] < P) {
        ++x[pos];
        for (std::size_t q = pos + 1; q < n; ++q) x[q] = -P;
        done = false;
        break;
      }
    }
    if (done) break;
  }
  return total;
}

Complex gk(const std::function<double(double)>& re, const std::function<double(double)>& im, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return {gauss_kronrod<double, 61>::integrate(re, a, b, 15, 1e-13),
          gauss_kronrod<double, 61>::integrate(im, a, b, 15, 1e-13)};
}

FormSystem square1() { return FormSystem({make_form(1, 2, {{1, {2}}})}, 0); }

}  // namespace

TEST_CASE("weyl_g examples") {
  CHECK(std::abs(weyl_g({square1(), 3, {Real(0)}, {}}) - Complex(7, 0)) < 1e-12);
  FormSystem two({make_form(2, 2, {{1, {2, 0}}, {1, {0, 2}}})}, 0);
  CHECK(std::abs(weyl_g({two, 2, {Real(0)}, {}}) - Complex(25, 0)) < 1e-12);
  // e(1/4) + 1 + e(1/4)
  CHECK(std::abs(weyl_g({square1(), 1, {Real(1) / 4}, {}}) - Complex(1, 2)) < 1e-12);
  CHECK_THROWS_AS(weyl_g({two, 2000, {Real(0)}, {}}, {1e6, 1}), BudgetExceeded);
  CHECK_THROWS_AS(weyl_g({two, 2, {Real(0)}, {{ev({2, 0}), Real(1)}}}), InvalidArgument);
}

TEST_CASE("weyl_g agrees with a naive high-precision sum") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const unsigned d = 2 + trial % 2;
    FormSystem sys({random_form(n, d, rng), random_form(n, d, rng)}, 0);
    std::vector<Real> alpha{Real(u(rng)) * 37, Real(u(rng)) / 3};
    std::map<ExponentVector, Real> om;
    for (const auto& e : monomials(n, 1)) om[e] = Real(u(rng));
    const std::int64_t P = trial < 6 ? 7 : 4;
    WeylSumSpec spec{sys, P, alpha, om};
    const Complex fast = weyl_g(spec, {1e8, 2});
    const Complex slow = naive_g(sys, P, alpha, om);
    CHECK(std::abs(fast - slow) < 1e-9);
    CHECK(std::abs(fast) <= std::pow(2.0 * P + 1, n) + 1e-9);
  }
}

TEST_CASE("lattice_sum is exact for phases with large integer parts") {
  // alpha = 1/3 + 10^6 leaves the sum unchanged; a double phase would not.
  FormSystem cubic({make_form(2, 3, {{1, {3, 0}}, {2, {1, 2}}})}, 0);
  const Real a = Real(1) / 3;
  const Complex base = weyl_g({cubic, 40, {a}, {}});
  const Complex shifted = weyl_g({cubic, 40, {a + 1000000}, {}});
  CHECK(std::abs(base - shifted) < 1e-9);
  CHECK(std::abs(base - naive_g(cubic, 40, {a}, {})) < 1e-8);
}

TEST_CASE("thread count does not change the value") {
  std::mt19937_64 rng(5);
  FormSystem sys({random_form(3, 2, rng)}, 0);
  WeylSumSpec spec{sys, 9, {Real("0.1234567")}, {}};
  const Complex one = weyl_g(spec, {1e8, 1});
  const Complex four = weyl_g(spec, {1e8, 4});
  CHECK(one == four);
}

TEST_CASE("shifted_S examples") {
  const auto sys = square1();
  const auto exp = taylor_shift(sys);
  const auto half = IrrationalMu::rational(Rational(1, 2));
  const auto s0 = shifted_S(sys, exp, IrrationalMu::sqrt_of(2), 4, {Real(0)});
  CHECK(std::abs(s0.direct - Complex(9, 0)) < 1e-12);
  // phases 1/4, 1/4, 9/4
  const auto s = shifted_S(sys, exp, half, 1, {Real(1)});
  CHECK(std::abs(s.direct - Complex(0, 3)) < 1e-12);
  CHECK(s.residual < 1e-12);
}

TEST_CASE("shifted sum factorises through g on random instances") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> pick(1, 8);
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 2;
    const unsigned d = 2 + (trial / 2) % 2;
    std::vector<Form> forms{random_form(n, d, rng)};
    if (trial % 5 == 0) forms.push_back(random_form(n, d, rng));
    FormSystem sys(forms, 0);
    const auto exp = taylor_shift(sys);
    IrrationalMu mu = trial % 3 == 0 ? IrrationalMu::rational(random_rational(rng))
                                     : IrrationalMu::quadratic(pick(rng) - 4, pick(rng), 2 + trial % 5 + (trial % 5 >= 2),
                                                               pick(rng));
    std::vector<Real> alpha;
    for (std::size_t k = 0; k < sys.R(); ++k) alpha.push_back(Real(u(rng)) * 5);
    const std::int64_t P = pick(rng);
    const auto s = shifted_S(sys, exp, mu, P, alpha);
    const double scale = std::max(1.0, std::abs(s.direct));
    worst = std::max(worst, s.residual / scale);
    CHECK(std::abs(shifted_S_fast(sys, exp, mu, P, alpha) - s.direct) < 1e-10 * std::pow(2.0 * P + 1, n));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("osc_integral examples") {
  FormSystem quad5({signature_quadratic()}, 0);
  OscIntegralSpec zero;
  zero.gamma = {0};
  CHECK(osc_integral(zero, quad5).value == Complex(32, 0));

  // Fresnel-type integral against adaptive Gauss-Kronrod
  OscIntegralSpec fres;
  fres.gamma = {1};
  const auto I = osc_integral(fres, square1());
  const Complex ref = gk([](double t) { return std::cos(2 * kPi * t * t); },
                         [](double t) { return std::sin(2 * kPi * t * t); }, -1, 1);
  CHECK(std::abs(I.value - ref) < 1e-10);
  CHECK(I.error_estimate < 1e-8);

  // linear phase: sin(2 pi g) / (pi g)
  for (double g : {0.3, 1.0, 2.75, 10.5}) {
    OscIntegralSpec lin;
    lin.gamma = {0};
    lin.gamma_diamond = {{ev({1}), g}};
    const auto L = osc_integral(lin, square1());
    CHECK(std::abs(L.value - Complex(std::sin(2 * kPi * g) / (kPi * g), 0)) < 1e-10);
  }
}

TEST_CASE("osc_integral tensor rule on a non-separable phase") {
  // int e(g x y) over the square = int_{-1}^{1} sin(2 pi g x) / (pi g x) dx
  FormSystem xy({make_form(2, 2, {{1, {1, 1}}})}, 0);
  for (double g : {0.5, 3.0}) {
    OscIntegralSpec spec;
    spec.gamma = {g};
    const auto I = osc_integral(spec, xy);
    CHECK_FALSE(I.separable);
    using boost::math::quadrature::gauss_kronrod;
    const double ref = gauss_kronrod<double, 61>::integrate(
        [g](double x) { return x == 0 ? 2.0 : std::sin(2 * kPi * g * x) / (kPi * g * x); }, -1, 1, 15, 1e-14);
    CHECK(std::abs(I.value - Complex(ref, 0)) < 1e-9);
    CHECK(std::abs(I.value) <= 4 + 1e-12);
  }
  OscIntegralSpec big;
  big.gamma = {1};
  FormSystem seven({make_form(7, 2, {{1, {1, 1, 0, 0, 0, 0, 0}}})}, 0);
  CHECK_THROWS_AS(osc_integral(big, seven), BudgetExceeded);
  OscIntegralSpec few = big;
  few.nodes = 1;
  CHECK_THROWS_AS(osc_integral(few, xy), InvalidArgument);
}

TEST_CASE("osc_integral modulus stays below the box volume") {
  FormSystem quad5({signature_quadratic()}, 0);
  double prev = 1e9;
  int decreases = 0;
  for (double g = 1; g <= 64; g *= 2) {
    OscIntegralSpec spec;
    spec.gamma = {g};
    const double m = std::abs(osc_integral(spec, quad5).value);
    CHECK(m <= 32 + 1e-12);
    decreases += m < prev;
    prev = m;
  }
  // Decay is asymptotic only; the sweep is reported, not asserted per step.
  MESSAGE("decreasing steps over gamma = 1..64: " << decreases);
}

TEST_CASE("complete_sum examples") {
  FormSystem sq = square1();
  CHECK(std::abs(complete_sum(1, 1, 1, {0}, {}, sq) - Complex(1, 0)) < 1e-14);
  // 1 + i + 1 + i
  CHECK(std::abs(complete_sum(4, 1, 4, {1}, {}, sq) - Complex(2, 2)) < 1e-12);
  CHECK_THROWS_AS(complete_sum(4, 1, 3, {1}, {}, sq), InvalidArgument);
  CHECK_THROWS_AS(complete_sum(1000, 1000, 1, {0}, {}, FormSystem({signature_quadratic()}, 0)), BudgetExceeded);
}

TEST_CASE("complete_sum periodicity and window shifts") {
  FormSystem sys({make_form(2, 3, {{1, {3, 0}}, {-2, {1, 2}}, {1, {0, 3}}})}, 0);
  const BigInt r = 6, D = 2, q = 4;
  const std::vector<BigInt> a{3};
  std::map<ExponentVector, BigInt> ad{{ev({1, 0}), 5}, {ev({1, 1}), -7}, {ev({0, 2}), 2}};
  const Complex base = complete_sum(r, D, q, a, ad, sys);

  auto shifted = ad;
  for (auto& [e, v] : shifted) v += r;
  CHECK(std::abs(complete_sum(r, D, q, a, shifted, sys) - base) < 1e-12);
  CHECK(std::abs(complete_sum(r, D, q, {a[0] + q}, ad, sys) - base) < 1e-12);

  // Direct sum over a translated window with exact rational phases.
  const long M = 12;
  for (long s0 : {0L, 5L, -17L}) {
    Complex acc = 0;
    for (long x = s0; x < s0 + M; ++x)
      for (long y = s0 - 3; y < s0 - 3 + M; ++y) {
        std::vector<Rational> pt{Rational(x), Rational(y)};
        Rational ph = Rational(a[0], q) * eval_form(sys.form(0), pt);
        for (const auto& [e, v] : ad) {
          Rational m(v, r);
          for (std::size_t i = 0; i < 2; ++i)
            for (std::uint32_t p = 0; p < e[i]; ++p) m *= pt[i];
          ph += m;
        }
        acc += e_rational(ph);
      }
    CHECK(std::abs(acc - base) < 1e-11);
  }
}

TEST_CASE("s_star at alpha = 0 and inconsistent certificates") {
  FormSystem sys({make_form(2, 2, {{1, {2, 0}}, {-1, {0, 2}}, {1, {1, 1}}})}, 0);
  const auto exp = taylor_shift(sys);
  const auto mu = IrrationalMu::sqrt_of(2);
  const auto params = dissection_params_for_delta(exp, Rational(1, 2));
  const std::int64_t P = 16;
  auto res = certify({Real(0)}, Real(P), exp, mu, params);
  REQUIRE(res.certificates);
  const auto star = s_star({Real(0)}, *res.certificates, sys, exp, mu, P);
  CHECK(std::abs(star.value - Complex(1024, 0)) < 1e-9);
  const auto S = shifted_S(sys, exp, mu, P, {Real(0)});
  CHECK(std::abs(S.direct - star.value) == doctest::Approx(33.0 * 33.0 - 1024.0));

  auto bad = *res.certificates;
  bad.birch.q = 3;
  CHECK_THROWS_AS(s_star({Real(0)}, bad, sys, exp, mu, P), InvalidArgument);
}

TEST_CASE("riemann residual stays on the P^{n-1} scale") {
  FormSystem sys({make_form(2, 2, {{1, {2, 0}}, {1, {1, 1}}, {-1, {0, 2}}})}, 0);
  const std::vector<double> gamma{0.75};
  const std::map<ExponentVector, double> gd{{ev({1, 0}), 0.5}};
  std::vector<double> normalised;
  for (std::int64_t P : {4, 8, 16, 32}) {
    const auto rr = riemann_residual(sys, P, gamma, gd);
    normalised.push_back(rr.normalised);
    CHECK(rr.residual < std::abs(rr.scaled_integral));
  }
  // the fitted constant is bounded and does not grow with P
  CHECK(normalised.back() <= 2 * normalised.front() + 1e-12);
  CHECK(*std::max_element(normalised.begin(), normalised.end()) < 10);
}

TEST_CASE("decay witness") {
  FormSystem sys({make_form(1, 2, {{1, {2}}})}, 0);
  CertificateSet unit;
  unit.birch = {1, {0}, Rational(0), Real(0)};
  unit.baker = {1, {}, Rational(1, 2)};
  unit.special = {1, 1, {0}, {0}};
  const auto mu = IrrationalMu::sqrt_of(2);
  CHECK(decay_witness({Real(0)}, Real(1000), unit, mu, 2) == 1.0);

  CertificateSet c;
  c.birch = {3, {1}, Rational(1, 4), Real(0)};
  c.baker = {612, {}, Rational(1, 2)};
  c.special = {1, 2, {204}, {577}};
  const Real alpha = Real(1) / 3;
  const Real dist = abs(Real(1224) * boost::multiprecision::sqrt(Real(2)) * alpha - 577);
  double prev = 2;
  for (double P : {10.0, 100.0, 1e4, 1e6}) {
    const double F = decay_witness({alpha}, Real(P), c, mu, 2);
    const double oracle = static_cast<double>(1 / (Real(3) * (Real(1224) + Real(P) * dist)));
    CHECK(F == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(F > 0);
    CHECK(F <= 1);
    CHECK(F < prev);
    prev = F;
  }
}

TEST_CASE("trace csv layout") {
  std::vector<TraceRow> rows{{{0.5, 0.25}, 3, 2.5, 0.5, 0.125}};
  const auto csv = trace_csv(rows);
  CHECK(csv == "alpha_1,alpha_2,abs_S,abs_S_star,residual,F\n0.5,0.25,3,2.5,0.5,0.125\n");
}
