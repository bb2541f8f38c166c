#include "shiftlab/expsums.hpp"

#include "shiftlab/parallel.hpp"
#include "shiftlab/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace shiftlab {

using u128 = unsigned __int128;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

u128 to_u128(std::int64_t x) { return static_cast<u128>(static_cast<__int128>(x)); }

u128 upow(std::int64_t x, std::uint32_t e) {
  u128 r = 1;
  const u128 b = to_u128(x);
  for (std::uint32_t i = 0; i < e; ++i) r *= b;
  return r;
}

double fixed_to_turns(u128 v) { return static_cast<double>(static_cast<std::uint64_t>(v >> 64)) * 0x1p-64; }

Complex unit(double turns) {
  const double a = kTwoPi * turns;
  return {std::cos(a), std::sin(a)};
}

Complex unit(const Real& turns) {
  const Real frac = turns - boost::multiprecision::floor(turns);
  return unit(static_cast<double>(frac));
}

double lattice_points(std::int64_t P, std::size_t n) { return std::pow(2.0 * static_cast<double>(P) + 1, static_cast<double>(n)); }

void check_budget(double points, const EvalOptions& options, const char* what) {
  if (points > options.budget)
    throw BudgetExceeded(std::string(what) + ": " + std::to_string(points) + " points exceed the budget of " +
                         std::to_string(options.budget));
}

}  // namespace

u128 fraction_to_fixed(const Real& x) {
  const Real frac = x - boost::multiprecision::floor(x);
  const Real scaled = boost::multiprecision::ldexp(frac, 128);
  BigInt v = static_cast<BigInt>(boost::multiprecision::floor(scaled));
  const BigInt mask64 = (BigInt(1) << 64) - 1;
  const auto hi = static_cast<std::uint64_t>((v >> 64) & mask64);
  const auto lo = static_cast<std::uint64_t>(v & mask64);
  return (static_cast<u128>(hi) << 64) | lo;
}

PhasePolynomial::PhasePolynomial(std::size_t n, const std::map<ExponentVector, Real>& coeffs) : n_(n) {
  for (const auto& [e, c] : coeffs) {
    if (e.size() != n) throw DimensionMismatch("PhasePolynomial: exponent length differs from n");
    const u128 fixed = fraction_to_fixed(c);
    if (fixed == 0) continue;
    terms_.push_back({e.exps(), fixed});
    degree_ = std::max(degree_, e.degree());
  }
}

double PhasePolynomial::evaluate(const std::vector<std::int64_t>& x) const {
  if (x.size() != n_) throw DimensionMismatch("PhasePolynomial::evaluate: wrong point length");
  u128 acc = 0;
  for (const auto& t : terms_) {
    u128 m = t.coeff;
    for (std::size_t i = 0; i < n_; ++i) m *= upow(x[i], t.exps[i]);
    acc += m;
  }
  return fixed_to_turns(acc);
}

void KahanSum::add(Complex v) {
  const Complex y = v - comp_;
  const Complex t = sum_ + y;
  comp_ = (t - sum_) - y;
  sum_ = t;
}

Complex lattice_sum(const PhasePolynomial& phase, std::int64_t P, const EvalOptions& options) {
  const std::size_t n = phase.n();
  if (n < 1) throw InvalidArgument("lattice_sum needs n >= 1");
  if (P < 0) throw InvalidArgument("lattice_sum needs P >= 0");
  check_budget(lattice_points(P, n), options, "lattice_sum");
  if (std::pow(static_cast<double>(std::max<std::int64_t>(P, 1)), phase.degree()) > 0x1p70)
    throw BudgetExceeded("lattice_sum: P^d too large for 128-bit fixed-point phases");

  // Group terms by the exponent of the innermost variable.
  const std::size_t inner = n - 1;
  unsigned deg_inner = 0;
  for (const auto& t : phase.terms()) deg_inner = std::max(deg_inner, t.exps[inner]);

  const std::size_t slabs = n >= 2 ? static_cast<std::size_t>(2 * P + 1) : 1;
  auto slab_sum = [&](std::size_t slab) {
    KahanSum acc;
    std::vector<std::int64_t> prefix(inner, -P);
    if (n >= 2) prefix[0] = -P + static_cast<std::int64_t>(slab);
    std::vector<u128> b(deg_inner + 1), diff(deg_inner + 1);
    while (true) {
      std::fill(b.begin(), b.end(), 0);
      for (const auto& t : phase.terms()) {
        u128 m = t.coeff;
        for (std::size_t i = 0; i < inner; ++i) m *= upow(prefix[i], t.exps[i]);
        b[t.exps[inner]] += m;
      }
      // Forward-difference table of the innermost polynomial at t = -P.
      for (unsigned k = 0; k <= deg_inner; ++k) {
        const std::int64_t tk = -P + static_cast<std::int64_t>(k);
        u128 v = 0;
        for (unsigned m = 0; m <= deg_inner; ++m) v += b[m] * upow(tk, m);
        diff[k] = v;
      }
      for (unsigned level = 1; level <= deg_inner; ++level)
        for (unsigned k = deg_inner; k >= level; --k) diff[k] -= diff[k - 1];
      for (std::int64_t t = -P; t <= P; ++t) {
        acc.add(unit(fixed_to_turns(diff[0])));
        for (unsigned k = 0; k < deg_inner; ++k) diff[k] += diff[k + 1];
      }
      // Odometer over prefix[1..inner-1]; prefix[0] is fixed by the slab.
      std::size_t pos = inner;
      bool done = true;
      while (pos > 1) {
        --pos;
        if (prefix[pos] < P) {
          ++prefix[pos];
          for (std::size_t q = pos + 1; q < inner; ++q) prefix[q] = -P;
          done = false;
          break;
        }
      }
      if (done) break;
    }
    return acc.value();
  };
  const auto parts = parallel_map<Complex>(slabs, options.threads, slab_sum);
  KahanSum total;
  for (const auto& p : parts) total.add(p);
  return total.value();
}

Complex weyl_g(const WeylSumSpec& spec, const EvalOptions& options) {
  const FormSystem& sys = spec.system;
  if (spec.alpha.size() != sys.R()) throw DimensionMismatch("weyl_g: alpha has the wrong length");
  if (spec.P < 1) throw InvalidArgument("weyl_g needs P >= 1");
  std::map<ExponentVector, Real> coeffs;
  for (std::size_t k = 0; k < sys.R(); ++k)
    for (const auto& [e, c] : sys.form(k).terms()) coeffs[e] += spec.alpha[k] * Real(c);
  for (const auto& [e, w] : spec.omega_diamond) {
    if (e.degree() < 1 || e.degree() + 1 > sys.d() || e.size() != sys.n())
      throw InvalidArgument("weyl_g: omega_diamond index " + e.str() + " outside 1 <= |j| <= d-1");
    coeffs[e] += w;
  }
  return lattice_sum(PhasePolynomial(sys.n(), coeffs), spec.P, options);
}

namespace {

Real alpha_f_mu(const std::vector<Real>& alpha, const ShiftExpansion& exp, const IrrationalMu& mu) {
  Real total = 0;
  const Real mud = pow(mu.value(), exp.d());
  for (std::size_t k = 0; k < exp.R(); ++k) total += alpha[k] * Real(exp.value_at_ones(k)) * mud;
  return total;
}

}  // namespace

ShiftedSum shifted_S(const FormSystem& system, const ShiftExpansion& exp, const IrrationalMu& mu, std::int64_t P,
                     const std::vector<Real>& alpha, const EvalOptions& options) {
  if (alpha.size() != system.R()) throw DimensionMismatch("shifted_S: alpha has the wrong length");
  if (P < 1) throw InvalidArgument("shifted_S needs P >= 1");
  const std::size_t n = system.n();
  check_budget(lattice_points(P, n), options, "shifted_S");
  ShiftedSum out;

  KahanSum direct;
  std::vector<std::int64_t> x(n, -P);
  std::vector<Real> shifted(n);
  while (true) {
    for (std::size_t i = 0; i < n; ++i) shifted[i] = Real(x[i]) + mu.value();
    Real phase = 0;
    for (std::size_t k = 0; k < system.R(); ++k) phase += alpha[k] * eval_form(system.form(k), shifted);
    direct.add(unit(phase));
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
  out.direct = direct.value();

  WeylSumSpec spec{system, P, alpha, {}};
  for (const auto& [e, w] : omega_diamond(omega(alpha, exp, mu), exp.d())) spec.omega_diamond.emplace(e, w.mid);
  out.factored = unit(alpha_f_mu(alpha, exp, mu)) * weyl_g(spec, options);
  out.residual = std::abs(out.direct - out.factored);
  return out;
}

Complex shifted_S_fast(const FormSystem& system, const ShiftExpansion& exp, const IrrationalMu& mu, std::int64_t P,
                       const std::vector<Real>& alpha, const EvalOptions& options) {
  if (alpha.size() != system.R()) throw DimensionMismatch("shifted_S_fast: alpha has the wrong length");
  std::map<ExponentVector, Real> coeffs;
  for (const auto& [e, w] : omega(alpha, exp, mu)) coeffs.emplace(e, w.mid);
  coeffs[ExponentVector(std::vector<std::uint32_t>(system.n(), 0))] = alpha_f_mu(alpha, exp, mu);
  return lattice_sum(PhasePolynomial(system.n(), coeffs), P, options);
}

namespace {

struct DoubleTerm {
  std::vector<std::uint32_t> exps;
  double coeff;
};

std::vector<DoubleTerm> osc_phase(const OscIntegralSpec& spec, const FormSystem& system) {
  if (spec.gamma.size() != system.R()) throw DimensionMismatch("osc_integral: gamma has the wrong length");
  std::map<ExponentVector, double> c;
  for (std::size_t k = 0; k < system.R(); ++k)
    for (const auto& [e, v] : system.form(k).terms()) c[e] += spec.gamma[k] * static_cast<double>(v);
  for (const auto& [e, v] : spec.gamma_diamond) {
    if (e.degree() < 1 || e.degree() + 1 > system.d() || e.size() != system.n())
      throw InvalidArgument("osc_integral: gamma_diamond index " + e.str() + " outside 1 <= |j| <= d-1");
    c[e] += v;
  }
  std::vector<DoubleTerm> out;
  for (const auto& [e, v] : c)
    if (v != 0) out.push_back({e.exps(), v});
  return out;
}

// Upper bound on the number of turns of the phase along any axis of [-1,1].
double turns_bound(const std::vector<DoubleTerm>& terms, std::size_t n) {
  double worst = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (const auto& t : terms) s += std::fabs(t.coeff) * t.exps[i];
    worst = std::max(worst, 2 * s);
  }
  return worst;
}

Complex integrate_1d(const std::vector<std::pair<unsigned, double>>& poly, std::size_t nodes, double tolerance,
                     double& error, double& evaluations) {
  double turns = 0;
  for (const auto& [p, c] : poly) turns += 2 * std::fabs(c) * p;
  std::size_t panels = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(turns / 4)));
  auto f = [&](double t) {
    double ph = 0;
    for (const auto& [p, c] : poly) ph += c * std::pow(t, static_cast<double>(p));
    return unit(ph);
  };
  for (int round = 0; round < 12; ++round) {
    const Complex coarse = composite_gauss<Complex>(f, -1, 1, panels, nodes);
    const Complex fine = composite_gauss<Complex>(f, -1, 1, panels, 2 * nodes);
    evaluations += static_cast<double>(panels * 3 * nodes);
    error = std::abs(fine - coarse);
    if (error <= tolerance) return fine;
    panels *= 2;
  }
  throw Error("osc_integral: one-dimensional quadrature did not converge");
}

Complex tensor_rule(const std::vector<DoubleTerm>& terms, std::size_t n, std::size_t panels, std::size_t m) {
  const GaussRule& rule = gauss_legendre(m);
  const std::size_t per_axis = panels * m;
  std::vector<double> x(per_axis), w(per_axis);
  const double h = 2.0 / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p)
    for (std::size_t i = 0; i < m; ++i) {
      x[p * m + i] = -1 + h * (static_cast<double>(p) + 0.5) + h / 2 * rule.nodes[i];
      w[p * m + i] = h / 2 * rule.weights[i];
    }
  unsigned maxdeg = 0;
  for (const auto& t : terms)
    for (auto e : t.exps) maxdeg = std::max(maxdeg, e);
  std::vector<std::vector<double>> powers(per_axis, std::vector<double>(maxdeg + 1, 1));
  for (std::size_t i = 0; i < per_axis; ++i)
    for (unsigned p = 1; p <= maxdeg; ++p) powers[i][p] = powers[i][p - 1] * x[i];
  std::vector<std::size_t> idx(n, 0);
  KahanSum acc;
  while (true) {
    double ph = 0, weight = 1;
    for (const auto& t : terms) {
      double v = t.coeff;
      for (std::size_t a = 0; a < n; ++a) v *= powers[idx[a]][t.exps[a]];
      ph += v;
    }
    for (std::size_t a = 0; a < n; ++a) weight *= w[idx[a]];
    acc.add(weight * unit(ph));
    std::size_t pos = n;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < per_axis) {
        done = false;
        break;
      }
      idx[pos] = 0;
    }
    if (done) break;
  }
  return acc.value();
}

}  // namespace

OscIntegral osc_integral(const OscIntegralSpec& spec, const FormSystem& system) {
  const std::size_t n = system.n();
  if (n > spec.max_dimension)
    throw BudgetExceeded("osc_integral: n = " + std::to_string(n) + " exceeds the dimension cap");
  if (spec.nodes < 2) throw InvalidArgument("osc_integral needs at least 2 nodes per axis");
  const auto terms = osc_phase(spec, system);
  OscIntegral out;
  if (terms.empty()) {
    out.value = std::pow(2.0, static_cast<double>(n));
    out.separable = true;
    return out;
  }
  bool separable = true;
  for (const auto& t : terms) {
    int vars = 0;
    for (auto e : t.exps) vars += e != 0;
    if (vars > 1) separable = false;
  }
  if (separable) {
    out.separable = true;
    Complex product = 1;
    double err_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::pair<unsigned, double>> poly;
      for (const auto& t : terms)
        if (t.exps[i] != 0) poly.emplace_back(t.exps[i], t.coeff);
      if (poly.empty()) {
        product *= 2.0;
        continue;
      }
      double err = 0;
      product *= integrate_1d(poly, spec.nodes, spec.tolerance * 1e-2, err, out.evaluations);
      err_sum += err;
    }
    out.value = product;
    out.error_estimate = err_sum * std::pow(2.0, static_cast<double>(n - 1));
    return out;
  }
  const std::size_t panels =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(turns_bound(terms, n) / 8)));
  const double coarse_evals = std::pow(static_cast<double>(panels * spec.nodes), static_cast<double>(n));
  const double fine_evals = std::pow(static_cast<double>(panels * 2 * spec.nodes), static_cast<double>(n));
  if (coarse_evals + fine_evals > spec.max_evaluations)
    throw BudgetExceeded("osc_integral: tensor rule needs " + std::to_string(coarse_evals + fine_evals) +
                         " evaluations");
  const Complex coarse = tensor_rule(terms, n, panels, spec.nodes);
  const Complex fine = tensor_rule(terms, n, panels, 2 * spec.nodes);
  out.value = fine;
  out.error_estimate = std::abs(fine - coarse);
  out.evaluations = coarse_evals + fine_evals;
  if (out.error_estimate > spec.tolerance)
    throw Error("osc_integral: estimate did not converge (error " + std::to_string(out.error_estimate) + ")");
  return out;
}

Complex complete_sum(const BigInt& r, const BigInt& D, const BigInt& q, const std::vector<BigInt>& a,
                     const std::map<ExponentVector, BigInt>& a_dagger, const FormSystem& system,
                     const EvalOptions& options) {
  if (r < 1 || D < 1 || q < 1) throw InvalidArgument("complete_sum needs r, D, q >= 1");
  if (a.size() != system.R()) throw DimensionMismatch("complete_sum: a has the wrong length");
  const BigInt Mbig = D * r;
  if (Mbig % q != 0) throw InvalidArgument("complete_sum: q does not divide Dr");
  const std::size_t n = system.n();
  check_budget(std::pow(static_cast<double>(Mbig), static_cast<double>(n)), options, "complete_sum");
  const auto M = static_cast<std::int64_t>(Mbig);
  auto mod = [&](const BigInt& v) {
    BigInt m = v % Mbig;
    if (m < 0) m += Mbig;
    return static_cast<std::int64_t>(m);
  };
  // Numerators over the common denominator Dr.
  std::map<ExponentVector, std::int64_t> coeff;
  const BigInt scale = Mbig / q;
  for (std::size_t k = 0; k < system.R(); ++k)
    for (const auto& [e, c] : system.form(k).terms()) coeff[e] = mod(coeff[e] + scale * a[k] * c);
  for (const auto& [e, v] : a_dagger) {
    if (e.degree() + 1 > system.d()) continue;  // top-degree entries do not enter
    if (e.degree() < 1 || e.size() != n) throw InvalidArgument("complete_sum: a_dagger index out of range");
    coeff[e] = mod(coeff[e] + D * v);
  }
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(M), 0);
  std::vector<std::int64_t> x(n, 0);
  while (true) {
    __int128 acc = 0;
    for (const auto& [e, c] : coeff) {
      __int128 m = c;
      for (std::size_t i = 0; i < n; ++i)
        for (std::uint32_t p = 0; p < e[i]; ++p) m = (m * x[i]) % M;
      acc = (acc + m) % M;
    }
    ++hist[static_cast<std::size_t>(acc)];
    std::size_t pos = n;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++x[pos] < M) {
        done = false;
        break;
      }
      x[pos] = 0;
    }
    if (done) break;
  }
  KahanSum total;
  for (std::int64_t m = 0; m < M; ++m) {
    if (hist[static_cast<std::size_t>(m)] == 0) continue;
    const long double ang = 2.0L * std::numbers::pi_v<long double> * static_cast<long double>(m) / static_cast<long double>(M);
    total.add(static_cast<double>(hist[static_cast<std::size_t>(m)]) *
              Complex(static_cast<double>(std::cos(ang)), static_cast<double>(std::sin(ang))));
  }
  return total.value();
}

SStar s_star(const std::vector<Real>& alpha, const CertificateSet& certs, const FormSystem& system,
             const ShiftExpansion& exp, const IrrationalMu& mu, std::int64_t P, const EvalOptions& options,
             const OscIntegralSpec& quad) {
  if (alpha.size() != system.R()) throw DimensionMismatch("s_star: alpha has the wrong length");
  const IdentityReport rep = identity_checks(certs, exp);
  if (!rep.all_pass()) throw InvalidArgument("s_star: inconsistent certificates");
  const auto& b = certs.birch;
  const auto& k = certs.baker;
  const BigInt Dr = certs.special.D * k.r;
  SStar out;
  out.complete = complete_sum(k.r, certs.special.D, b.q, b.a, k.a_dagger, system, options);
  const Real Pr = P;
  const unsigned d = system.d();
  OscIntegralSpec spec = quad;
  spec.gamma.clear();
  spec.gamma_diamond.clear();
  for (std::size_t i = 0; i < system.R(); ++i)
    spec.gamma.push_back(static_cast<double>(pow(Pr, d) * (alpha[i] - Real(b.a[i]) / Real(b.q))));
  for (const auto& [e, w] : omega_diamond(omega(alpha, exp, mu), d)) {
    auto it = k.a_dagger.find(e);
    const Real aj = it == k.a_dagger.end() ? Real(0) : Real(it->second);
    spec.gamma_diamond.emplace(e, static_cast<double>(pow(Pr, e.degree()) * (w.mid - aj / Real(k.r))));
  }
  out.gamma = spec.gamma;
  out.gamma_diamond = spec.gamma_diamond;
  out.integral = osc_integral(spec, system);
  const double scale = static_cast<double>(pow(Pr / Real(Dr), system.n()));
  out.value = scale * out.complete * out.integral.value * unit(alpha_f_mu(alpha, exp, mu));
  return out;
}

double decay_witness(const std::vector<Real>& alpha, const Real& P, const CertificateSet& certs, const IrrationalMu& mu,
                     unsigned d) {
  const auto& b = certs.birch;
  const auto& s = certs.special;
  Real dist1 = 0, dist2 = 0;
  const Real Er = Real(s.E) * Real(certs.baker.r);
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    dist1 = std::max(dist1, Real(abs(Real(b.q) * alpha[k] - Real(b.a[k]))));
    dist2 = std::max(dist2, Real(abs(Er * mu.value() * alpha[k] - Real(s.a2.at(k)))));
  }
  const Real first = Real(b.q) + pow(P, d) * dist1;
  const Real second = Er + pow(P, d - 1) * dist2;
  return static_cast<double>(1 / (first * second));
}

RiemannResidual riemann_residual(const FormSystem& system, std::int64_t P, const std::vector<double>& gamma,
                                 const std::map<ExponentVector, double>& gamma_diamond, const EvalOptions& options) {
  WeylSumSpec spec{system, P, {}, {}};
  const Real Pr = P;
  double gmax = 0, gdmax = 0;
  for (double g : gamma) {
    spec.alpha.push_back(Real(g) / pow(Pr, system.d()));
    gmax = std::max(gmax, std::fabs(g));
  }
  for (const auto& [e, g] : gamma_diamond) {
    spec.omega_diamond.emplace(e, Real(g) / pow(Pr, e.degree()));
    gdmax = std::max(gdmax, std::fabs(g));
  }
  OscIntegralSpec ospec;
  ospec.gamma = gamma;
  ospec.gamma_diamond = gamma_diamond;
  RiemannResidual out;
  out.g = weyl_g(spec, options);
  out.scaled_integral = std::pow(static_cast<double>(P), static_cast<double>(system.n())) * osc_integral(ospec, system).value;
  out.residual = std::abs(out.g - out.scaled_integral);
  out.normalised = out.residual / (std::pow(static_cast<double>(P), static_cast<double>(system.n()) - 1) * (1 + gmax + gdmax));
  return out;
}

std::string trace_csv(const std::vector<TraceRow>& rows) {
  std::ostringstream os;
  const std::size_t R = rows.empty() ? 1 : rows.front().alpha.size();
  for (std::size_t k = 0; k < R; ++k) os << "alpha_" << k + 1 << ',';
  os << "abs_S,abs_S_star,residual,F\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf << sep;
  };
  for (const auto& r : rows) {
    for (double a : r.alpha) put(a, ',');
    put(r.abs_S, ',');
    put(r.abs_S_star, ',');
    put(r.residual, ',');
    put(r.F, '\n');
  }
  return os.str();
}

}  // namespace shiftlab
