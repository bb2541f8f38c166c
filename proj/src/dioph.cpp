#include "shiftlab/dioph.hpp"

#include "shiftlab/vandermonde.hpp"

#include <cmath>
#include <sstream>

namespace shiftlab {

namespace {

const Real& rel_slack() {
  static const Real eps("1e-90");
  return eps;
}

Enclosure power_of(const Real& P, const Rational& e) {
  Enclosure out;
  out.mid = pow(P, to_real(e));
  out.rad = rel_slack() * out.mid;
  return out;
}

// Double-precision screen for |c x - round(c x)| against a bound: returns
// false only when the candidate certainly fails.
struct FracScreen {
  double frac = 0;

  explicit FracScreen(const Real& x) { frac = static_cast<double>(x - boost::multiprecision::floor(x)); }

  bool may_pass(std::uint64_t c, double bound) const {
    const double v = static_cast<double>(c) * frac;
    const double dist = std::fabs(v - std::nearbyint(v));
    return dist <= bound * (1 + 1e-9) + 4.0 * static_cast<double>(c) * kUnitRoundoff + 1e-300;
  }
};

Decision combine(Decision acc, Decision next) {
  if (acc == Decision::no || next == Decision::no) return Decision::no;
  if (acc == Decision::undecided || next == Decision::undecided) return Decision::undecided;
  return Decision::yes;
}

std::uint64_t scan_limit(const Real& bound, std::uint64_t cap, const char* what) {
  if (bound < 1) return 0;
  const BigInt limit = floor_to_int(bound);
  if (limit > cap)
    throw BudgetExceeded(std::string(what) + " scan of " + limit.str() + " candidates exceeds the cap of " +
                         std::to_string(cap));
  return static_cast<std::uint64_t>(limit);
}

}  // namespace

OmegaMap omega(const std::vector<Real>& alpha, const ShiftExpansion& exp, const IrrationalMu& mu) {
  if (alpha.size() != exp.R()) throw DimensionMismatch("omega: alpha has the wrong length");
  OmegaMap out;
  std::vector<Enclosure> mu_pow(exp.d() + 1);
  for (unsigned k = 0; k <= exp.d(); ++k) mu_pow[k] = mu.power(k);
  for (unsigned j = 1; j <= exp.d(); ++j) {
    for (const auto& e : monomials(exp.n(), j)) {
      const Enclosure& mp = mu_pow[exp.d() - j];
      Enclosure w;
      for (std::size_t k = 0; k < exp.R(); ++k) {
        const BigInt c = exp.coeff(k, e);
        if (c == 0) continue;
        const Real ca = Real(c) * alpha[k];
        w.mid += ca * mp.mid;
        w.rad += abs(ca) * mp.rad;
      }
      w.rad += rel_slack() * abs(w.mid);
      out.emplace(e, w);
    }
  }
  return out;
}

OmegaMap omega_diamond(const OmegaMap& full, unsigned d) {
  OmegaMap out;
  for (const auto& [e, w] : full)
    if (e.degree() + 1 <= d) out.emplace(e, w);
  return out;
}

BirchSearchResult birch_search(const std::vector<Real>& alpha, const Real& P, const Rational& theta, unsigned d,
                               const SearchOptions& options) {
  if (theta <= 0 || theta > 1) throw InvalidArgument("birch_search needs 0 < theta <= 1");
  if (alpha.empty()) throw InvalidArgument("birch_search needs R >= 1");
  if (P < 1) throw InvalidArgument("birch_search needs P >= 1");
  const std::size_t R = alpha.size();
  const Rational e = Rational(static_cast<long long>(R * (d - 1))) * theta;
  const Enclosure Q = power_of(P, e);
  const Enclosure B = power_of(P, e - Rational(d));

  BirchSearchResult result;
  // Returns the decision for candidate q and fills a / quality.
  auto test = [&](const BigInt& q, std::vector<BigInt>& a, Real& quality) {
    quality = 0;
    a.assign(R, 0);
    for (std::size_t k = 0; k < R; ++k) {
      const Real qa = Real(q) * alpha[k];
      a[k] = round_nearest(qa);
      quality = std::max(quality, Real(abs(qa - Real(a[k]))));
    }
    Decision dec = less_equal(Enclosure{Real(q), 0}, Q);
    dec = combine(dec, less_equal(Enclosure{2 * quality, 0}, B));
    return dec;
  };
  auto primitive = [](const BigInt& q, const std::vector<BigInt>& a) {
    BigInt g = q;
    for (const auto& v : a) g = gcd(g, v);
    return g == 1;
  };
  auto record = [&](const BigInt& q, std::vector<BigInt> a, const Real& quality) {
    if (!result.certificate) {
      result.certificate = BirchCertificate{q, std::move(a), theta, quality};
    } else {
      result.unique = false;
    }
  };

  // Legendre: if 2|q alpha - a| <= B with q <= Q and Q B < 1, then a/q is a
  // convergent of alpha.
  if (R == 1 && options.use_continued_fractions && Q.upper() * B.upper() < 1) {
    result.continued_fraction_path = true;
    for (const auto& c : real_convergents(alpha[0], 200)) {
      if (Real(c.q) > Q.upper()) break;
      ++result.scanned;
      std::vector<BigInt> a;
      Real quality;
      const Decision dec = test(c.q, a, quality);
      if (dec == Decision::undecided) result.undecided = true;
      if (dec == Decision::yes && primitive(c.q, a)) record(c.q, std::move(a), quality);
    }
    return result;
  }

  const std::uint64_t qmax = scan_limit(Q.upper(), options.cap, "birch_search");
  std::vector<FracScreen> screens;
  for (const auto& x : alpha) screens.emplace_back(x);
  const double bound_half = static_cast<double>(B.upper()) / 2;
  for (std::uint64_t q = 1; q <= qmax; ++q) {
    ++result.scanned;
    bool may = true;
    for (const auto& s : screens)
      if (!s.may_pass(q, bound_half)) {
        may = false;
        break;
      }
    if (!may) continue;
    std::vector<BigInt> a;
    Real quality;
    const Decision dec = test(BigInt(q), a, quality);
    if (dec == Decision::undecided) result.undecided = true;
    if (dec == Decision::yes && primitive(BigInt(q), a)) record(BigInt(q), std::move(a), quality);
  }
  return result;
}

namespace {

BigInt max_abs_slice_det(const ShiftExpansion& exp) {
  const auto S = independent_degrees(exp);
  BigInt cf = 1;
  bool any = false;
  for (unsigned j : {exp.d(), exp.d() - 1}) {
    if (j == 0 || !S.count(j)) continue;
    const IntMatrix C = slice_matrix(exp, j);
    const auto rows = first_independent_rows(C);
    IntMatrix sub(exp.R(), exp.R());
    for (std::size_t r = 0; r < exp.R(); ++r)
      for (std::size_t k = 0; k < exp.R(); ++k) sub(r, k) = C(rows[r], k);
    const BigInt det = boost::multiprecision::abs(determinant(sub));
    cf = any ? std::max(cf, det) : det;
    any = true;
  }
  return cf;
}

Rational delta_factor(const ShiftExpansion& exp, const BigInt& N) {
  const auto R = static_cast<long long>(exp.R());
  const auto d = static_cast<long long>(exp.d());
  return Rational(BigInt(R * (R + 1) * d * d) * N + 1);
}

}  // namespace

DissectionParams dissection_params(const ShiftExpansion& exp, std::optional<Rational> theta0) {
  DissectionParams p;
  p.R = exp.R();
  p.d = exp.d();
  p.N = total_monomial_count(exp.n(), exp.d());
  const auto R = static_cast<long long>(p.R);
  const auto d = static_cast<long long>(p.d);
  p.theta0 = theta0 ? *theta0 : Rational(BigInt(1), BigInt(64 * R * (R + 1) * d * d) * p.N);
  if (p.theta0 <= 0) throw InvalidArgument("theta0 must be positive");
  p.delta = delta_factor(exp, p.N) * p.theta0;
  p.C_f = max_abs_slice_det(exp);
  return p;
}

DissectionParams dissection_params_for_delta(const ShiftExpansion& exp, const Rational& delta) {
  if (delta <= 0) throw InvalidArgument("delta must be positive");
  const BigInt N = total_monomial_count(exp.n(), exp.d());
  return dissection_params(exp, delta / delta_factor(exp, N));
}

BakerSearchResult baker_search(const OmegaMap& omega, const Real& P, const DissectionParams& params,
                               const SearchOptions& options) {
  if (P < 1) throw InvalidArgument("baker_search needs P >= 1");
  const Enclosure Pd = power_of(P, params.delta);
  std::vector<Enclosure> bound(params.d + 1);
  std::vector<double> bound_d(params.d + 1);
  for (unsigned j = 1; j <= params.d; ++j) {
    bound[j] = power_of(P, params.delta - Rational(j));
    bound_d[j] = static_cast<double>(bound[j].upper());
  }
  std::vector<std::pair<ExponentVector, Enclosure>> entries(omega.begin(), omega.end());
  std::vector<FracScreen> screens;
  for (const auto& [e, w] : entries) {
    if (e.degree() < 1 || e.degree() > params.d) throw InvalidArgument("baker_search: omega index out of range");
    screens.emplace_back(w.mid);
  }

  BakerSearchResult result;
  const std::uint64_t rmax = scan_limit(Pd.upper(), options.cap, "baker_search");
  for (std::uint64_t r = 1; r <= rmax; ++r) {
    ++result.scanned;
    bool may = true;
    for (std::size_t i = 0; i < entries.size() && may; ++i)
      may = screens[i].may_pass(r, bound_d[entries[i].first.degree()] + static_cast<double>(r) *
                                                                             static_cast<double>(entries[i].second.rad));
    if (!may) continue;
    Decision dec = less_than(Enclosure{Real(r), 0}, Pd);
    std::map<ExponentVector, BigInt> a;
    for (const auto& [e, w] : entries) {
      const Real rw = Real(r) * w.mid;
      const BigInt aj = round_nearest(rw);
      dec = combine(dec, less_than(Enclosure{abs(rw - Real(aj)), Real(r) * w.rad}, bound[e.degree()]));
      if (dec == Decision::no) break;
      if (aj != 0) a.emplace(e, aj);
    }
    if (dec == Decision::undecided) result.undecided = true;
    if (dec != Decision::yes) continue;
    BigInt g = r;
    for (const auto& [e, v] : a) g = gcd(g, v);
    if (g != 1) continue;  // a multiple of an earlier certificate
    if (!result.certificate) {
      result.certificate = BakerCertificate{BigInt(r), std::move(a), params.delta};
    } else {
      result.unique = false;
    }
  }
  return result;
}

SpecialSlice special_from_slices(const ShiftExpansion& exp, unsigned j, const std::map<ExponentVector, BigInt>& a_slice) {
  if (j < 1 || j > exp.d()) throw InvalidArgument("special_from_slices: degree out of range");
  const IntMatrix C = slice_matrix(exp, j);
  if (rank(C) != exp.R())
    throw InvalidArgument("special_from_slices: degree " + std::to_string(j) + " is not in the independent set");
  const auto mons = monomials(exp.n(), j);
  for (const auto& [e, v] : a_slice)
    if (e.degree() != j || e.size() != exp.n()) throw DimensionMismatch("special_from_slices: a_slice index mismatch");
  SpecialSlice out;
  out.rows = first_independent_rows(C);
  out.rows.resize(exp.R());
  const std::size_t R = exp.R();
  IntMatrix Cp(R, R);
  IntMatrix Ap(R, 1);
  for (std::size_t t = 0; t < R; ++t) {
    for (std::size_t k = 0; k < R; ++k) Cp(t, k) = C(out.rows[t], k);
    auto it = a_slice.find(mons[out.rows[t]]);
    Ap(t, 0) = it == a_slice.end() ? BigInt(0) : it->second;
  }
  out.D = determinant(Cp);
  out.adjugate = adjugate(Cp);
  const IntMatrix prod = multiply(out.adjugate, Ap);
  out.a.resize(R);
  for (std::size_t k = 0; k < R; ++k) out.a[k] = prod(k, 0);
  return out;
}

namespace {

void normalise(BigInt& D, std::vector<BigInt>& a) {
  if (D < 0) {
    D = -D;
    for (auto& v : a) v = -v;
  }
  BigInt g = D;
  for (const auto& v : a) g = gcd(g, v);
  if (g > 1) {
    D /= g;
    for (auto& v : a) v /= g;
  }
}

std::map<ExponentVector, BigInt> degree_part(const std::map<ExponentVector, BigInt>& a, unsigned j) {
  std::map<ExponentVector, BigInt> out;
  for (const auto& [e, v] : a)
    if (e.degree() == j) out.emplace(e, v);
  return out;
}

}  // namespace

SpecialCertificate special_certificate(const ShiftExpansion& exp, const BakerCertificate& baker) {
  SpecialCertificate cert;
  auto top = special_from_slices(exp, exp.d(), degree_part(baker.a_dagger, exp.d()));
  auto next = special_from_slices(exp, exp.d() - 1, degree_part(baker.a_dagger, exp.d() - 1));
  cert.D = top.D;
  cert.a1 = top.a;
  cert.E = next.D;
  cert.a2 = next.a;
  normalise(cert.D, cert.a1);
  normalise(cert.E, cert.a2);
  return cert;
}

IdentityReport identity_checks(const CertificateSet& certs, const ShiftExpansion& exp) {
  IdentityReport rep;
  const auto& b = certs.birch;
  const auto& k = certs.baker;
  const auto& s = certs.special;
  if (b.a.size() != exp.R() || s.a1.size() != exp.R()) throw DimensionMismatch("identity_checks: R mismatch");
  const BigInt Dr = s.D * k.r;
  rep.q_divides_Dr = b.q != 0 && Dr % b.q == 0;
  rep.equality1 = true;
  for (std::size_t i = 0; i < exp.R(); ++i)
    if (b.q * s.a1[i] != Dr * b.a[i]) rep.equality1 = false;
  rep.equality2 = true;
  for (const auto& e : monomials(exp.n(), exp.d())) {
    BigInt sum = 0;
    for (std::size_t i = 0; i < exp.R(); ++i) sum += exp.coeff(i, e) * b.a[i];
    auto it = k.a_dagger.find(e);
    const BigInt aj = it == k.a_dagger.end() ? BigInt(0) : it->second;
    if (b.q * aj != k.r * sum) {
      rep.equality2 = false;
      rep.equality2_failures.push_back(e);
    }
  }
  return rep;
}

MajorArcResult certify(const std::vector<Real>& alpha, const Real& P, const ShiftExpansion& exp, const IrrationalMu& mu,
                       const DissectionParams& params, const SearchOptions& options) {
  MajorArcResult out;
  out.birch = birch_search(alpha, P, params.theta0, exp.d(), options);
  out.baker = baker_search(omega(alpha, exp, mu), P, params, options);
  if (out.birch.certificate && out.baker.certificate) {
    CertificateSet set{*out.birch.certificate, *out.baker.certificate,
                       special_certificate(exp, *out.baker.certificate)};
    out.certificates = std::move(set);
  }
  return out;
}

std::string certificate_report(const CertificateSet& certs) {
  std::ostringstream os;
  auto vec = [&](const std::vector<BigInt>& v) {
    os << '[';
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << ']';
  };
  os << "birch.q = " << certs.birch.q << "\nbirch.a = ";
  vec(certs.birch.a);
  os << "\nbirch.theta = " << to_string(certs.birch.theta) << "\nbirch.quality = " << to_string(certs.birch.quality, 20)
     << "\nbaker.r = " << certs.baker.r << "\nbaker.delta = " << to_string(certs.baker.delta) << '\n';
  for (const auto& [e, v] : certs.baker.a_dagger) os << "baker.a" << e.str() << " = " << v << '\n';
  os << "special.D = " << certs.special.D << "\nspecial.a1 = ";
  vec(certs.special.a1);
  os << "\nspecial.E = " << certs.special.E << "\nspecial.a2 = ";
  vec(certs.special.a2);
  os << '\n';
  return os.str();
}

}  // namespace shiftlab
