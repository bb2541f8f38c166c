#include "shiftlab/quadrature.hpp"

#include "shiftlab/numeric.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace shiftlab {

namespace {

GaussRule build_rule(std::size_t m) {
  GaussRule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  for (std::size_t i = 0; i < (m + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_m.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(m) + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = x;
      for (std::size_t k = 2; k <= m; ++k) {
        const double pk = ((2.0 * static_cast<double>(k) - 1) * x * p1 - (static_cast<double>(k) - 1) * p0) /
                          static_cast<double>(k);
        p0 = p1;
        p1 = pk;
      }
      const double pm = m == 1 ? x : p1;
      const double pm1 = m == 1 ? 1 : p0;
      dp = static_cast<double>(m) * (x * pm - pm1) / (x * x - 1);
      const double dx = pm / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    const double w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0;
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t m) {
  if (m < 1) throw InvalidArgument("gauss_legendre needs at least one node");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[m];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(m));
  return *slot;
}

SiCi sine_cosine_integrals(double x) {
  if (!(x > 0)) throw InvalidArgument("sine_cosine_integrals needs x > 0");
  constexpr double euler = 0.57721566490153286061;
  constexpr double eps = 1e-16;
  if (x < 2) {
    // Power series.
    double si = 0, ci = 0, term = 1;
    for (int k = 1; k < 60; ++k) {
      term *= x / k;
      const double contrib = term / k;
      switch (k % 4) {
        case 1: si += contrib; break;
        case 2: ci -= contrib; break;
        case 3: si -= contrib; break;
        case 0: ci += contrib; break;
      }
      if (contrib < eps * std::fabs(si + ci) + 1e-300) break;
    }
    return {si, euler + std::log(x) + ci};
  }
  // Lentz continued fraction for E1(ix).
  using C = std::complex<double>;
  C b(1, x);
  C c = 1e300;
  C d = 1.0 / b;
  C h = d;
  for (int i = 2; i < 100000; ++i) {
    const double a = -static_cast<double>((i - 1) * (i - 1));
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (std::fabs(del.real() - 1) + std::fabs(del.imag()) < eps) break;
  }
  h *= C(std::cos(x), -std::sin(x));
  return {std::numbers::pi / 2 + h.imag(), -h.real()};
}

double cos_over_square_tail(double w, double A) {
  const double aw = std::fabs(w);
  if (aw == 0) return 1 / A;
  // cos(wA)/A - |w| (pi/2 - Si(|w| A))
  return std::cos(aw * A) / A - aw * (std::numbers::pi / 2 - sine_cosine_integrals(aw * A).si);
}

}  // namespace shiftlab
