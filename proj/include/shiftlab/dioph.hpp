#pragma once

#include "shiftlab/forms.hpp"
#include "shiftlab/mu.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace shiftlab {

using OmegaMap = std::map<ExponentVector, Enclosure>;

// omega_j = sum_k d_{k,j} alpha_k mu^{d-|j|} for every 1 <= |j|_1 <= d; the
// radius carries mu's uncertainty.
OmegaMap omega(const std::vector<Real>& alpha, const ShiftExpansion& exp, const IrrationalMu& mu);

// Entries with |j|_1 <= d-1 only.
OmegaMap omega_diamond(const OmegaMap& full, unsigned d);

struct BirchCertificate {
  BigInt q;
  std::vector<BigInt> a;
  Rational theta;
  Real quality;  // max_k |q alpha_k - a_k|
};

struct SearchOptions {
  std::uint64_t cap = 10'000'000;
  // R = 1 only: scan continued-fraction convergents when they provably
  // contain every solution.
  bool use_continued_fractions = true;
};

struct BirchSearchResult {
  std::optional<BirchCertificate> certificate;
  // No second primitive certificate exists in the scanned range.
  bool unique = true;
  // Some candidate sat on the boundary within working precision.
  bool undecided = false;
  bool continued_fraction_path = false;
  std::uint64_t scanned = 0;
};

// Smallest q in [1, P^{R(d-1)theta}] with gcd(q, a) = 1 and
// 2 max_k |q alpha_k - a_k| <= P^{R(d-1)theta - d}.
BirchSearchResult birch_search(const std::vector<Real>& alpha, const Real& P, const Rational& theta, unsigned d,
                               const SearchOptions& options = {});

struct DissectionParams {
  Rational theta0;
  Rational delta;  // (R(R+1) N d^2 + 1) theta0
  BigInt N;
  BigInt C_f;
  std::size_t R = 0;
  unsigned d = 0;
};

// theta0 defaults to 1 / (64 R(R+1) N d^2).
DissectionParams dissection_params(const ShiftExpansion& exp, std::optional<Rational> theta0 = std::nullopt);
// Same, choosing theta0 so that delta comes out as given.
DissectionParams dissection_params_for_delta(const ShiftExpansion& exp, const Rational& delta);

struct BakerCertificate {
  BigInt r;
  std::map<ExponentVector, BigInt> a_dagger;
  Rational delta;
};

struct BakerSearchResult {
  std::optional<BakerCertificate> certificate;
  bool unique = true;
  bool undecided = false;
  std::uint64_t scanned = 0;
};

// Smallest r < P^delta with |r omega_j - a_j| < P^{delta - |j|_1} for all j.
BakerSearchResult baker_search(const OmegaMap& omega, const Real& P, const DissectionParams& params,
                               const SearchOptions& options = {});

struct SpecialSlice {
  BigInt D;                        // det C'_j
  std::vector<BigInt> a;           // D (C'_j)^{-1} A'_j
  std::vector<std::size_t> rows;   // T_j, rows of C_j in C'_j
  IntMatrix adjugate;              // D (C'_j)^{-1}
};

// a_slice holds a_j for |j|_1 = j (absent entries are zero). Throws unless
// j lies in the independent-degree set.
SpecialSlice special_from_slices(const ShiftExpansion& exp, unsigned j, const std::map<ExponentVector, BigInt>& a_slice);

struct SpecialCertificate {
  BigInt D, E;
  std::vector<BigInt> a1, a2;
};

// D, a1 from the degree-d slice and E, a2 from degree d-1, signs normalised
// so D, E > 0 and common factors removed.
SpecialCertificate special_certificate(const ShiftExpansion& exp, const BakerCertificate& baker);

struct CertificateSet {
  BirchCertificate birch;
  BakerCertificate baker;
  SpecialCertificate special;
};

struct IdentityReport {
  bool equality1 = false;     // q a1 = D r a
  bool q_divides_Dr = false;
  bool equality2 = false;     // q a_j = r sum_k d_{k,j} a_k, |j|_1 = d
  std::vector<ExponentVector> equality2_failures;

  bool all_pass() const { return equality1 && q_divides_Dr && equality2; }
};

IdentityReport identity_checks(const CertificateSet& certs, const ShiftExpansion& exp);

struct MajorArcResult {
  BirchSearchResult birch;
  BakerSearchResult baker;
  std::optional<CertificateSet> certificates;
};

// Runs the Birch search at theta0 and the Baker search at delta, then builds
// the special certificate when both succeed.
MajorArcResult certify(const std::vector<Real>& alpha, const Real& P, const ShiftExpansion& exp, const IrrationalMu& mu,
                       const DissectionParams& params, const SearchOptions& options = {});

// Structured-text report with exact integer fields.
std::string certificate_report(const CertificateSet& certs);

}  // namespace shiftlab
