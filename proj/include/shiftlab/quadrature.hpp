#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace shiftlab {

// Gauss-Legendre rule on [-1, 1]; nodes ascending. Cached per size.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(std::size_t m);

// Composite rule: `panels` equal panels on [a, b], m nodes each.
template <class T, class F>
T composite_gauss(F&& f, double a, double b, std::size_t panels, std::size_t m) {
  const GaussRule& rule = gauss_legendre(m);
  const double h = (b - a) / static_cast<double>(panels);
  T total{};
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + h / 2;
    T part{};
    for (std::size_t i = 0; i < m; ++i) part += rule.weights[i] * f(mid + h / 2 * rule.nodes[i]);
    total += part * (h / 2);
  }
  return total;
}

// Sine and cosine integrals Si(x), Ci(x) for x > 0.
struct SiCi {
  double si;
  double ci;
};
SiCi sine_cosine_integrals(double x);

// Integral of cos(w a) / a^2 over a in [A, inf), A > 0.
double cos_over_square_tail(double w, double A);

}  // namespace shiftlab
