#pragma once

#include "shiftlab/forms.hpp"

#include <initializer_list>
#include <random>
#include <utility>
#include <vector>

namespace testing_helpers {

using namespace shiftlab;

struct TermSpec {
  long long coeff;
  std::vector<std::uint32_t> exps;
};

inline Form make_form(std::size_t n, unsigned d, std::initializer_list<TermSpec> terms) {
  Form::Terms t;
  for (const auto& s : terms) t[ExponentVector(s.exps)] += s.coeff;
  return Form(n, d, t);
}

inline ExponentVector ev(std::vector<std::uint32_t> e) { return ExponentVector(std::move(e)); }

// x1^2 + x2^2 - x3^2 - x4^2 - x5^2
inline Form signature_quadratic(std::size_t n = 5) {
  Form::Terms t;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint32_t> e(n, 0);
    e[i] = 2;
    t[ExponentVector(e)] = i < 2 ? 1 : -1;
  }
  return Form(n, 2, t);
}

inline Form random_form(std::size_t n, unsigned d, std::mt19937_64& rng, int height = 5) {
  std::uniform_int_distribution<int> coeff(-height, height);
  Form::Terms t;
  for (const auto& e : monomials(n, d)) {
    int c = coeff(rng);
    if (c != 0) t[e] = c;
  }
  if (t.empty()) {
    std::vector<std::uint32_t> e(n, 0);
    e[0] = d;
    t[ExponentVector(e)] = 1;
  }
  return Form(n, d, t);
}

inline Rational random_rational(std::mt19937_64& rng, int height = 20) {
  std::uniform_int_distribution<int> num(-height, height);
  std::uniform_int_distribution<int> den(1, height);
  return Rational(BigInt(num(rng)), BigInt(den(rng)));
}

}  // namespace testing_helpers
