// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Every expected value is computed here by an independent route; nothing is
// hard-coded from outside.

#include "helpers.hpp"
#include "shiftlab/dissection.hpp"
#include "shiftlab/expsums.hpp"
#include "shiftlab/vandermonde.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>

using namespace shiftlab;
using namespace testing_helpers;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::uint64_t count_with(const FormSystem& sys, const IrrationalMu& mu, const std::vector<Rational>& tau,
                         const Rational& eta, std::int64_t P, CountMethod m) {
  return count(CountSpec{sys, taylor_shift(sys), mu, tau, eta, P, m}).count;
}

Form diagonal_form(std::size_t n, unsigned d, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> c(-5, 5);
  Form::Terms t;
  for (std::size_t i = 0; i < n; ++i) {
    int v = c(rng);
    if (v == 0) v = 2;
    std::vector<std::uint32_t> e(n, 0);
    e[i] = d;
    t[ExponentVector(e)] = v;
  }
  return Form(n, d, t);
}

Outcome end_to_end() {
  ExperimentSpec spec{FormSystem({signature_quadratic()}, 0), IrrationalMu::sqrt_of(2), {Rational(0)},
                      Rational(1, 4), {25, 50, 100, 200}};
  spec.density.qmc.samples = std::uint64_t(1) << 25;
  spec.method = CountMethod::diagonal_mitm;
  spec.tolerance = 0.15;
  const auto rep = verify_asymptotic(spec);
  const double rel_se = rep.density.std_error / rep.density.c;
  std::ostringstream os;
  os << "c=" << fmt(rep.density.c) << " (rel se " << fmt(100 * rel_se, 3) << "%), ratios";
  std::vector<double> dev;
  for (const auto& r : rep.series) {
    os << ' ' << fmt(r.ratio, 5);
    dev.push_back(std::fabs(r.ratio - 1));
  }
  bool flags = false;
  for (const auto& r : rep.series) flags |= r.result.boundary_flags > 0;
  const bool ok = rel_se < 0.01 && dev.size() == 4 && dev[3] <= 0.15 && dev[2] <= dev[1] && dev[3] <= dev[2] &&
                  !flags && rep.status == VerifyStatus::pass;
  return {ok, os.str()};
}

Outcome sandwich() {
  const FormSystem sys({make_form(2, 2, {{1, {2, 0}}, {-1, {0, 2}}})}, 0);
  const auto exp = taylor_shift(sys);
  const auto mu = IrrationalMu::sqrt_of(2);
  const Rational eta(1, 2);
  bool ok = true;
  std::ostringstream os;
  for (std::int64_t P : {3, 5, 8}) {
    const auto N = count_with(sys, mu, {Rational(0)}, eta, P, CountMethod::generic);
    const auto loose = r_plus_minus(sys, exp, mu, {Rational(0)}, eta, P);
    // A large enough that the rigorous tail drops below 1/2.
    RPlusMinusOptions tight;
    const double points = static_cast<double>(loose.points);
    tight.A = 4 * points * loose.kernel.L / (std::numbers::pi * std::numbers::pi * to_double(eta));
    const auto r = r_plus_minus(sys, exp, mu, {Rational(0)}, eta, P, tight);
    const bool both = sandwich_holds(loose, N) && sandwich_holds(r, N) && r.tail < 1;
    ok &= both;
    os << "P=" << P << ": " << fmt(r.minus - r.tail - r.quad_error, 5) << " <= " << N << " <= "
       << fmt(r.plus + r.tail + r.quad_error, 5) << " (tail " << fmt(r.tail, 2) << "; A=10T tail "
       << fmt(loose.tail, 3) << (sandwich_holds(loose, N) ? " holds" : " FAILS") << ")  ";
  }
  return {ok, os.str()};
}

Outcome kernel_grid() {
  bool ok = true;
  double worst = 0;
  std::size_t points = 0;
  for (double eta : {0.25, 0.5, 1.0})
    for (double L : {1.0, 2.5, 6.0}) {
      const auto grid = sandwich_grid(kernel_params_with_L(eta, L));
      ok &= grid.size() == 201;
      for (const auto& p : grid) {
        ok &= p.ordered && p.ft_minus >= 0 && p.ft_minus <= p.band && p.band <= p.ft_plus && p.ft_plus <= 1;
        worst = std::max(worst, p.max_mismatch);
        ++points;
      }
    }
  ok &= worst <= 1e-6;
  return {ok, std::to_string(points) + " grid points over 9 (eta, L) settings, max |closed - quadrature| " +
                  fmt(worst, 3)};
}

Outcome exact_identities() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> pick(1, 8);
  double sg_worst = 0;
  int taylor_ok = 0, slice_ok = 0, top_ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const unsigned d = 2 + (trial / 3) % 3;
    std::vector<Form> forms{random_form(n, d, rng)};
    if (trial % 4 == 0) forms.push_back(random_form(n, d, rng));
    const FormSystem sys(forms, 0);
    const auto exp = taylor_shift(sys);

    // S(alpha) = e(alpha . f(mu 1)) g(alpha, omega_diamond), summed both ways.
    const IrrationalMu mu = trial % 3 == 0 ? IrrationalMu::rational(random_rational(rng))
                                           : IrrationalMu::quadratic(pick(rng) - 4, pick(rng),
                                                                     2 + trial % 5 + (trial % 5 >= 2), pick(rng));
    std::vector<Real> alpha;
    for (std::size_t k = 0; k < sys.R(); ++k) alpha.push_back(Real(u(rng)) * 3);
    const std::int64_t P = n == 3 ? 1 + trial % 3 : 1 + trial % 6;
    const auto s = shifted_S(sys, exp, mu, P, alpha);
    sg_worst = std::max(sg_worst, s.residual / std::max(1.0, std::abs(s.direct)));

    // Taylor reconstruction against direct rational evaluation.
    const Rational q = random_rational(rng);
    std::vector<Rational> x(n), shifted(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = random_rational(rng);
      shifted[i] = x[i] + q;
    }
    bool all = true;
    for (std::size_t k = 0; k < sys.R(); ++k) all &= taylor_reconstruct(exp, k, q, x) == eval_form(sys.form(k), shifted);
    taylor_ok += all;

    all = true;
    bool top = true;
    for (std::size_t k = 0; k < sys.R(); ++k) {
      all &= slice(exp, k, d - 1) == directional_derivative_ones(sys.form(k));
      top &= slice(exp, k, d) == Polynomial::from_form(sys.form(k));
    }
    slice_ok += all;
    top_ok += top;
  }
  const bool ok = sg_worst <= 1e-10 && taylor_ok == 100 && slice_ok == 100 && top_ok == 100;
  return {ok, "Sg rel residual " + fmt(sg_worst, 3) + ", Taylor " + std::to_string(taylor_ok) + "/100, slice " +
                  std::to_string(slice_ok) + "/100, top " + std::to_string(top_ok) + "/100"};
}

Outcome vandermonde_family() {
  bool ok = true;
  int families = 0;
  for (std::size_t n = 1; n <= 3; ++n)
    for (unsigned d = 2; d <= 4; ++d) {  // forms have degree >= 2
      const auto dirs = build_directions(n, d);
      const auto fam = build_family(dirs);
      ++families;
      for (unsigned j = 1; j <= d; ++j) {
        const BigInt& delta = fam.delta(j);
        ok &= delta != 0;
        // Product formula over the Vandermonde parameters.
        const auto p = vandermonde_parameters(dirs, j);
        BigInt prod = 1;
        for (std::size_t a = 0; a < p.size(); ++a)
          for (std::size_t b = a + 1; b < p.size(); ++b) prod *= p[b] - p[a];
        ok &= prod == delta;
        // Delta_j M_j^{-1} from the exact rational inverse has integer entries.
        const auto inv = inverse(fam.M(j));
        for (std::size_t r = 0; r < inv.rows(); ++r)
          for (std::size_t c = 0; c < inv.cols(); ++c)
            ok &= denominator(Rational(inv(r, c) * Rational(delta))) == 1;
      }
    }
  return {ok, std::to_string(families) + " families (n <= 3, 2 <= d <= 4)"};
}

Outcome certificates() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1, 1);
  // Birch: planted primitive (q, a) with the perturbation inside the bound.
  int birch_ok = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t R = 1 + trial % 2;
    const Real P = 1000000;
    const Rational theta(1, 2);  // d = 2: Q = P^{R/2}, bound P^{R/2 - 2}
    const Real bound = pow(P, to_real(Rational(static_cast<long>(R), 2) - 2));
    BigInt q;
    std::vector<BigInt> a(R);
    do {
      q = 1 + static_cast<long>(rng() % 500);
      for (auto& v : a) v = static_cast<long>(rng() % (4 * static_cast<long>(q))) - 2 * static_cast<long>(q);
      BigInt g = q;
      for (const auto& v : a) g = gcd(g, v);
      if (g == 1) break;
    } while (true);
    std::vector<Real> alpha;
    for (const auto& v : a) alpha.push_back(Real(v) / Real(q) + Real(u(rng)) * bound / (4 * Real(q)));
    const auto res = birch_search(alpha, P, theta, 2);
    birch_ok += res.certificate && res.certificate->q == q && res.certificate->a == a;
  }

  // Baker: planted primitive (r, a_dagger) over all |j|_1 <= d.
  int baker_ok = 0;
  const auto exp3 = taylor_shift(FormSystem({make_form(2, 3, {{1, {3, 0}}, {-2, {1, 2}}, {1, {0, 3}}})}, 0));
  const auto params = dissection_params_for_delta(exp3, Rational(1, 3));
  const Real P = Real(1000000) * 1000000;  // P^delta = 10^4
  for (int trial = 0; trial < 500; ++trial) {
    const long r = 1 + static_cast<long>(rng() % 9000);
    OmegaMap w;
    std::map<ExponentVector, BigInt> planted;
    BigInt g = r;
    for (unsigned j = 1; j <= 3; ++j)
      for (const auto& e : monomials(2, j)) {
        const long aj = static_cast<long>(rng() % (2 * r)) - r;
        const Real bound = pow(P, to_real(Rational(1, 3) - Rational(j)));
        w[e] = Enclosure{Real(aj) / r + Real(u(rng)) * bound / (4 * r), 0};
        if (aj != 0) planted[e] = aj;
        g = gcd(g, BigInt(aj));
      }
    if (g != 1) {
      --trial;
      continue;
    }
    const auto res = baker_search(w, P, params);
    baker_ok += res.certificate && res.certificate->r == r && res.certificate->a_dagger == planted;
  }

  // Identities on consistent certificate sets, then three corruptions of each.
  const auto exp = taylor_shift(FormSystem({signature_quadratic()}, 0));
  const auto mu = IrrationalMu::sqrt_of(2);
  const auto dp = dissection_params_for_delta(exp, Rational(1, 2));
  int consistent = 0, passed = 0, caught = 0;
  for (long qd : {2, 3, 4, 5, 7})
    for (long an = 1; an < qd; ++an) {
      if (gcd(BigInt(an), BigInt(qd)) != 1) continue;
      const std::vector<Real> alpha{Real(an) / qd};
      const auto birch = birch_search(alpha, Real(1000000), Rational(1, 4), 2);
      const auto baker = baker_search(omega(alpha, exp, mu), Real(1000000), dp);
      if (!birch.certificate || !baker.certificate) continue;
      const CertificateSet set{*birch.certificate, *baker.certificate, special_certificate(exp, *baker.certificate)};
      ++consistent;
      passed += identity_checks(set, exp).all_pass();
      CertificateSet bad1 = set, bad2 = set, bad3 = set;
      bad1.special.a1[0] += 1;
      bad2.birch.q *= 5;
      bad3.baker.a_dagger[ExponentVector({2, 0, 0, 0, 0})] += 1;
      caught += !identity_checks(bad1, exp).equality1;
      caught += !identity_checks(bad2, exp).all_pass();
      caught += !identity_checks(bad3, exp).equality2;
    }
  const bool ok = birch_ok == 500 && baker_ok == 500 && consistent > 0 && passed == consistent &&
                  caught == 3 * consistent;
  return {ok, "Birch " + std::to_string(birch_ok) + "/500, Baker " + std::to_string(baker_ok) + "/500, identities " +
                  std::to_string(passed) + "/" + std::to_string(consistent) + ", corruptions caught " +
                  std::to_string(caught) + "/" + std::to_string(3 * consistent)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(4242);
  std::uniform_int_distribution<int> pick(0, 1000);
  int agree = 0;
  std::uint64_t flags = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 5;
    const unsigned d = 2 + trial % 4;
    std::vector<Form> forms{diagonal_form(n, d, rng)};
    if (trial % 3 == 0) forms.push_back(diagonal_form(n, d, rng));
    const FormSystem sys(forms, 0);
    std::int64_t P = 1;
    while (std::pow(2.0 * static_cast<double>(P + 1) + 1, static_cast<double>(n)) <= 1e5 && P < 40) ++P;
    P = 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(P));
    IrrationalMu mu = trial % 3 == 0   ? IrrationalMu::rational(random_rational(rng, 9))
                      : trial % 3 == 1 ? IrrationalMu::sqrt_of(2 + trial % 5 + (trial % 5 >= 2))
                                       : IrrationalMu::decimal("1.4142135623730950488016887242096980785696718753769");
    std::vector<Rational> tau;
    for (std::size_t k = 0; k < sys.R(); ++k) tau.push_back(Rational(BigInt(pick(rng) - 500), BigInt(1 + trial % 7)));
    const Rational eta(BigInt(1 + pick(rng)), BigInt(20));
    const CountSpec spec{sys, taylor_shift(sys), mu, tau, eta, P, CountMethod::automatic};
    const auto g = count_generic(spec);
    const auto m = count_diagonal_mitm(spec);
    agree += g.count == m.count && g.boundary_flags == m.boundary_flags;
    flags += g.boundary_flags;
  }
  return {agree == 200, std::to_string(agree) + "/200 identical (boundary flags " + std::to_string(flags) + ")"};
}

Outcome residual_scaling() {
  const FormSystem sys({make_form(2, 2, {{1, {2, 0}}, {1, {1, 1}}, {-1, {0, 2}}})}, 0);
  const std::vector<std::pair<std::vector<double>, std::map<ExponentVector, double>>> probes{
      {{0.75}, {{ExponentVector({1, 0}), 0.5}}},
      {{-1.5}, {{ExponentVector({0, 1}), 1.25}}},
      {{0.3}, {{ExponentVector({1, 0}), -0.8}, {ExponentVector({0, 1}), 0.4}}},
      {{2.0}, {}}};
  std::vector<double> lx, ly;
  std::ostringstream os;
  for (std::int64_t P : {4, 8, 16, 32}) {
    double worst = 0;
    for (const auto& [g, gd] : probes) worst = std::max(worst, riemann_residual(sys, P, g, gd).residual);
    lx.push_back(std::log(static_cast<double>(P)));
    ly.push_back(std::log(worst));
    os << "P=" << P << ":" << fmt(worst, 4) << ' ';
  }
  const double mx = (lx[0] + lx[1] + lx[2] + lx[3]) / 4, my = (ly[0] + ly[1] + ly[2] + ly[3]) / 4;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  const double slope = sxy / sxx;
  os << "fitted exponent " << fmt(slope, 4) << " (limit 1.2)";
  return {slope <= 1.2, os.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 end-to-end asymptotic", end_to_end},
      {"2 unconditional sandwich", sandwich},
      {"3 kernel sandwich grid", kernel_grid},
      {"4 exact identities", exact_identities},
      {"5 Vandermonde family", vandermonde_family},
      {"6 certificate round trips", certificates},
      {"7 oracle equivalence", oracle_equivalence},
      {"8 residual scaling", residual_scaling},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s  %-28s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
