#pragma once

#include "shiftlab/numeric.hpp"

#include <vector>

namespace shiftlab {

enum class KernelSign { minus, plus };

struct KernelParams {
  double eta = 0;
  double P = 1;
  double T = 1;
  double L = 1;    // max(1, log T)
  double rho = 0;  // eta / L

  // width of the second indicator, 2 eta -/+ rho
  double width(KernelSign s) const { return s == KernelSign::plus ? 2 * eta + rho : 2 * eta - rho; }
};

struct Schedule {
  double T;
  double L;
};

// T(P) = min(P^delta, 1 + log(1 + P), P), L = max(1, log T).
Schedule schedule(double P, const Rational& delta);
KernelParams kernel_params(double eta, double P, const Rational& delta);
// Fixed L, for experiments that sweep the smoothing directly.
KernelParams kernel_params_with_L(double eta, double L);

// K(alpha) = sin(pi alpha rho) sin(pi alpha w) / (pi^2 alpha^2 rho), w = 2 eta -/+ rho.
double kernel(KernelSign sign, double alpha, const KernelParams& params);
double product_kernel(KernelSign sign, const std::vector<double>& alpha, const KernelParams& params);

// Fourier transform of K: overlap length of [t - rho/2, t + rho/2] with
// [-w/2, w/2], divided by rho. A trapezoid.
double kernel_ft(KernelSign sign, double t, const KernelParams& params);

// Indicator of the open band |t| < eta.
double band_indicator(double t, double eta);

// |K(alpha)| <= min(2 eta + rho, L / (pi^2 eta alpha^2)).
double kernel_bound(double alpha, const KernelParams& params);

// Integral of |K| over |alpha| > A, from the bound above.
double kernel_tail(double A, const KernelParams& params);
// Integral of |K| over the real line, from the same bound.
double kernel_l1_bound(KernelSign sign, const KernelParams& params);

// Cross-check of kernel_ft: Gauss-Legendre quadrature of the transform
// integral over |alpha| <= A (A = cutoff / rho), plus the exact tail beyond A
// from sine/cosine integrals.
double kernel_ft_quadrature(KernelSign sign, double t, const KernelParams& params, double cutoff = 1e3);

struct SandwichPoint {
  double t;
  double ft_minus;
  double band;
  double ft_plus;
  double quad_minus;
  double quad_plus;
  bool ordered;        // 0 <= ft- <= U <= ft+ <= 1
  double max_mismatch; // max |closed form - quadrature|
};

// Grid t = -2 eta .. 2 eta with spacing eta / 50 (201 points).
std::vector<SandwichPoint> sandwich_grid(const KernelParams& params, double cutoff = 1e3);

}  // namespace shiftlab
