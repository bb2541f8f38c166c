#pragma once

#include "shiftlab/exact_linalg.hpp"
#include "shiftlab/numeric.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace shiftlab {

// Multi-index j with |j|_1 = degree.
//
// Ordering (operator<): lower total degree first; within a degree, graded
// reverse-lexicographic from the largest monomial down, so for n = 2, j = 2
// the order is x1^2, x1 x2, x2^2. Every matrix indexed by monomials (slice
// matrices, Vandermonde matrices) uses this order.
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(std::vector<std::uint32_t> exps);

  std::size_t size() const { return exps_.size(); }
  std::uint32_t degree() const { return degree_; }
  std::uint32_t operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<std::uint32_t>& exps() const { return exps_; }

  friend bool operator==(const ExponentVector& a, const ExponentVector& b) { return a.exps_ == b.exps_; }
  friend bool operator<(const ExponentVector& a, const ExponentVector& b);

  std::string str() const;

 private:
  std::vector<std::uint32_t> exps_;
  std::uint32_t degree_ = 0;
};

// All exponent vectors of length n and total degree j, in the global order.
std::vector<ExponentVector> monomials(std::size_t n, unsigned j);

// Homogeneous form of degree d >= 2 in n >= 1 variables, integer coefficients.
// A degree-1 "form" is accepted only through Form::linear (test integrands).
class Form {
 public:
  using Terms = std::map<ExponentVector, BigInt>;

  Form(std::size_t n, unsigned d, Terms terms);
  static Form linear(std::size_t n, Terms terms);

  std::size_t n() const { return n_; }
  unsigned d() const { return d_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  // Every term involves a single variable.
  bool is_diagonal() const;

  BigInt content() const;
  Form scaled(const BigInt& factor) const;
  std::string str() const;

  friend bool operator==(const Form&, const Form&) = default;

 private:
  Form() = default;
  std::size_t n_ = 0;
  unsigned d_ = 0;
  Terms terms_;
};

// Sparse polynomial of any degree with rational coefficients.
class Polynomial {
 public:
  using Terms = std::map<ExponentVector, Rational>;

  explicit Polynomial(std::size_t n) : n_(n) {}
  Polynomial(std::size_t n, Terms terms);
  static Polynomial from_form(const Form& f);

  std::size_t n() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const ExponentVector& e, const Rational& c);
  Polynomial derivative(std::size_t var) const;
  Rational evaluate(const std::vector<Rational>& x) const;

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  std::size_t n_;
  Terms terms_;
};

Rational eval_form(const Form& f, const std::vector<Rational>& x);
Real eval_form(const Form& f, const std::vector<Real>& x);
std::vector<Polynomial> gradient(const Form& f);

// Sum of the partial derivatives, (1,...,1) . grad f.
Polynomial directional_derivative_ones(const Form& f);

struct HypothesisReport;

class FormSystem {
 public:
  FormSystem(std::vector<Form> forms, std::int64_t sigma, bool rescaled = false);

  std::size_t R() const { return forms_.size(); }
  std::size_t n() const { return n_; }
  unsigned d() const { return d_; }
  std::int64_t sigma() const { return sigma_; }
  // (n - sigma) / (R (d-1) 2^{d-1}).
  const Rational& kappa() const { return kappa_; }
  bool rescaled() const { return rescaled_; }
  const std::vector<Form>& forms() const { return forms_; }
  const Form& form(std::size_t k) const { return forms_.at(k); }
  bool is_diagonal() const;

 private:
  std::vector<Form> forms_;
  std::size_t n_ = 0;
  unsigned d_ = 0;
  std::int64_t sigma_ = 0;
  Rational kappa_;
  bool rescaled_ = false;
};

struct RescaleResult {
  FormSystem system;
  // multiplier[k] was applied to form k; callers must scale tau_k and eta
  // by the same factor to keep the counting problem unchanged.
  std::vector<BigInt> multipliers;
};

RescaleResult rescale_to_dfactorial(const FormSystem& sys);

// Exact table d_{k,j} = j!^{-1} (d^j f_k)(1,...,1) for 1 <= |j|_1 <= d,
// plus the constant f_k(1,...,1).
class ShiftExpansion {
 public:
  using Table = std::map<ExponentVector, BigInt>;

  ShiftExpansion(std::size_t n, unsigned d, std::vector<Table> coeffs, std::vector<BigInt> value_at_ones);

  std::size_t R() const { return coeffs_.size(); }
  std::size_t n() const { return n_; }
  unsigned d() const { return d_; }
  // Zero when the entry is absent.
  BigInt coeff(std::size_t k, const ExponentVector& j) const;
  const Table& table(std::size_t k) const { return coeffs_.at(k); }
  const BigInt& value_at_ones(std::size_t k) const { return value_at_ones_.at(k); }
  // Power of mu carried by the slice of degree |j|_1.
  unsigned mu_power(const ExponentVector& j) const { return d_ - j.degree(); }

 private:
  std::size_t n_;
  unsigned d_;
  std::vector<Table> coeffs_;
  std::vector<BigInt> value_at_ones_;
};

ShiftExpansion taylor_shift(const FormSystem& sys);

// F_{k,j}: the degree-j slice of form k (k is 0-based, 1 <= j <= d).
Polynomial slice(const ShiftExpansion& exp, std::size_t k, unsigned j);

// C_j: N_j x R, row t / column k holds d_{k, j_t}.
IntMatrix slice_matrix(const ShiftExpansion& exp, unsigned j);

std::set<unsigned> independent_degrees(const ShiftExpansion& exp);

// f_k(x + mu*1) assembled from the slices; used by the identity checks.
Rational taylor_reconstruct(const ShiftExpansion& exp, std::size_t k, const Rational& mu,
                            const std::vector<Rational>& x);

struct SigmaProbe {
  std::size_t points = 0;
  std::size_t min_rank = 0;
  std::size_t max_rank = 0;
  // Sampled points where rank(grad f_k) < R.
  std::size_t deficient = 0;
};

struct HypothesisReport {
  bool numvars_ok = false;
  BigInt numvars_threshold;  // sigma + R(R+1)(d-1)2^{d-1}
  Rational kappa;
  bool kappa_exceeds_R_plus_1 = false;
  std::set<unsigned> slice_independent_degrees;
  bool top_slice_ok = false;       // d in S
  bool gradient_slice_ok = false;  // d-1 in S and R <= N_{d-1}
  SigmaProbe sigma_probe;

  bool all_ok() const { return numvars_ok && top_slice_ok && gradient_slice_ok; }
};

struct ProbeOptions {
  std::size_t points = 200;
  std::int64_t height = 10000;
  std::uint64_t seed = 1;
};

HypothesisReport check_hypotheses(const FormSystem& sys, const ProbeOptions& probe = {});

// Form input document:
// { "n": int, "d": int, "forms": [[{"coeff": "int", "exps": [..]}, ...], ...], "sigma": int }
FormSystem parse_form_document(const std::string& json_text);
FormSystem load_form_document(const std::string& path);
std::string form_document(const FormSystem& sys);

}  // namespace shiftlab
