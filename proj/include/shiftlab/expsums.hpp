#pragma once

#include "shiftlab/dioph.hpp"
#include "shiftlab/forms.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace shiftlab {

using Complex = std::complex<double>;

struct EvalOptions {
  // Largest number of lattice points (or residues) one sum may visit.
  double budget = 2e8;
  unsigned threads = 1;
};

// Polynomial phase x -> sum_j c_j x^j reduced mod 1. Coefficients are stored
// as 128-bit fixed-point fractions, so c_j x^j mod 1 is exact up to the
// 2^-128 rounding of c_j times |x^j|.
class PhasePolynomial {
 public:
  struct Term {
    std::vector<std::uint32_t> exps;
    unsigned __int128 coeff;
  };

  PhasePolynomial(std::size_t n, const std::map<ExponentVector, Real>& coeffs);

  std::size_t n() const { return n_; }
  unsigned degree() const { return degree_; }
  const std::vector<Term>& terms() const { return terms_; }
  // Phase at x as a fraction of a full turn, 64-bit resolution.
  double evaluate(const std::vector<std::int64_t>& x) const;

 private:
  std::size_t n_;
  unsigned degree_ = 0;
  std::vector<Term> terms_;
};

unsigned __int128 fraction_to_fixed(const Real& x);

// Compensated complex accumulator.
class KahanSum {
 public:
  void add(Complex v);
  Complex value() const { return sum_; }

 private:
  Complex sum_{0, 0};
  Complex comp_{0, 0};
};

// sum over x in [-P, P]^n of e(phase(x)). Slabs by leading coordinate are
// reduced in ascending order.
Complex lattice_sum(const PhasePolynomial& phase, std::int64_t P, const EvalOptions& options = {});

struct WeylSumSpec {
  FormSystem system;
  std::int64_t P = 1;
  std::vector<Real> alpha;
  // omega_j for 1 <= |j|_1 <= d-1; absent entries are zero.
  std::map<ExponentVector, Real> omega_diamond;
};

// g(alpha, omega_diamond) = sum_{|x| <= P} e(alpha . f(x) + sum_j omega_j x^j).
Complex weyl_g(const WeylSumSpec& spec, const EvalOptions& options = {});

struct ShiftedSum {
  Complex direct;    // sum of e(alpha . f(x + mu 1)) point by point
  Complex factored;  // e(alpha . f(mu 1)) g(alpha, omega_diamond)
  double residual = 0;
};

// S(alpha) by direct high-precision evaluation at every point, alongside the
// factorisation through g.
ShiftedSum shifted_S(const FormSystem& system, const ShiftExpansion& exp, const IrrationalMu& mu, std::int64_t P,
                     const std::vector<Real>& alpha, const EvalOptions& options = {});

// Fast S(alpha) through the phase engine on the shifted polynomial.
Complex shifted_S_fast(const FormSystem& system, const ShiftExpansion& exp, const IrrationalMu& mu, std::int64_t P,
                       const std::vector<Real>& alpha, const EvalOptions& options = {});

struct OscIntegralSpec {
  std::vector<double> gamma;
  std::map<ExponentVector, double> gamma_diamond;  // 1 <= |j|_1 <= d-1
  std::size_t nodes = 64;                          // per panel, doubled for the estimate
  std::size_t max_dimension = 6;
  double max_evaluations = 5e7;
  double tolerance = 1e-8;
};

struct OscIntegral {
  Complex value;
  double error_estimate = 0;
  bool separable = false;
  double evaluations = 0;
};

// I(gamma, gamma_diamond) over [-1, 1]^n. Separable phases integrate as a
// product of one-dimensional integrals; otherwise tensor Gauss-Legendre.
OscIntegral osc_integral(const OscIntegralSpec& spec, const FormSystem& system);

// S_{r,D,q}(a, a_dagger): sum over x mod Dr of
// e(a . f(x) / q + sum_{|j|_1 <= d-1} a_j x^j / r), exact integer phases.
Complex complete_sum(const BigInt& r, const BigInt& D, const BigInt& q, const std::vector<BigInt>& a,
                     const std::map<ExponentVector, BigInt>& a_dagger, const FormSystem& system,
                     const EvalOptions& options = {});

struct SStar {
  Complex value;
  Complex complete;
  OscIntegral integral;
  std::vector<double> gamma;
  std::map<ExponentVector, double> gamma_diamond;
};

// P^n (Dr)^{-n} S_{r,D,q}(a, a_dagger) I(gamma, gamma_diamond) e(alpha . f(mu 1)).
SStar s_star(const std::vector<Real>& alpha, const CertificateSet& certs, const FormSystem& system,
             const ShiftExpansion& exp, const IrrationalMu& mu, std::int64_t P, const EvalOptions& options = {},
             const OscIntegralSpec& quad = {});

// F(alpha; P) = (q + P^d |q alpha - a|)^{-1} (Er + P^{d-1} |Er mu alpha - a2|)^{-1}.
double decay_witness(const std::vector<Real>& alpha, const Real& P, const CertificateSet& certs, const IrrationalMu& mu,
                     unsigned d);

struct RiemannResidual {
  Complex g;
  Complex scaled_integral;  // P^n I(gamma, gamma_diamond)
  double residual = 0;      // |g - P^n I|
  double normalised = 0;    // residual / (P^{n-1} (1 + |gamma| + |gamma_diamond|))
};

// g at alpha = gamma / P^d, omega_j = gamma_j / P^{|j|_1} against P^n I.
RiemannResidual riemann_residual(const FormSystem& system, std::int64_t P, const std::vector<double>& gamma,
                                 const std::map<ExponentVector, double>& gamma_diamond,
                                 const EvalOptions& options = {});

struct TraceRow {
  std::vector<double> alpha;
  double abs_S = 0;
  double abs_S_star = 0;
  double residual = 0;
  double F = 0;
};

std::string trace_csv(const std::vector<TraceRow>& rows);

}  // namespace shiftlab
