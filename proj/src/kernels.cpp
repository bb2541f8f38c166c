#include "shiftlab/kernels.hpp"

#include "shiftlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shiftlab {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) {
  if (std::fabs(x) < 1e-4) {
    const double x2 = x * x;
    return 1 - x2 / 6 + x2 * x2 / 120;
  }
  return std::sin(x) / x;
}

}  // namespace

Schedule schedule(double P, const Rational& delta) {
  if (!(P >= 1)) throw InvalidArgument("schedule needs P >= 1");
  if (delta <= 0) throw InvalidArgument("schedule needs delta > 0");
  // also capped by P itself so that T(P) <= P holds for any delta
  const double T = std::min({std::pow(P, to_double(delta)), 1 + std::log1p(P), P});
  return {T, std::max(1.0, std::log(T))};
}

KernelParams kernel_params(double eta, double P, const Rational& delta) {
  if (!(eta > 0)) throw InvalidArgument("kernel parameters need eta > 0");
  const Schedule s = schedule(P, delta);
  KernelParams k;
  k.eta = eta;
  k.P = P;
  k.T = s.T;
  k.L = s.L;
  k.rho = eta / s.L;
  return k;
}

KernelParams kernel_params_with_L(double eta, double L) {
  if (!(eta > 0) || !(L >= 1)) throw InvalidArgument("kernel parameters need eta > 0 and L >= 1");
  KernelParams k;
  k.eta = eta;
  k.L = L;
  k.T = std::exp(L);
  k.rho = eta / L;
  return k;
}

double kernel(KernelSign sign, double alpha, const KernelParams& params) {
  const double w = params.width(sign);
  return w * sinc(kPi * alpha * params.rho) * sinc(kPi * alpha * w);
}

double product_kernel(KernelSign sign, const std::vector<double>& alpha, const KernelParams& params) {
  double p = 1;
  for (double a : alpha) p *= kernel(sign, a, params);
  return p;
}

double kernel_ft(KernelSign sign, double t, const KernelParams& params) {
  // rho <= w, so the overlap is clamp((w + rho)/2 - |t|, 0, rho).
  const double w = params.width(sign);
  const double ramp = ((w + params.rho) / 2 - std::fabs(t)) / params.rho;
  return std::clamp(ramp, 0.0, 1.0);
}

double band_indicator(double t, double eta) { return std::fabs(t) < eta ? 1.0 : 0.0; }

double kernel_bound(double alpha, const KernelParams& params) {
  const double near = 2 * params.eta + params.rho;
  if (alpha == 0) return near;
  return std::min(near, params.L / (kPi * kPi * params.eta * alpha * alpha));
}

double kernel_tail(double A, const KernelParams& params) {
  if (!(A > 0)) throw InvalidArgument("kernel_tail needs A > 0");
  return 2 * params.L / (kPi * kPi * params.eta * A);
}

double kernel_l1_bound(KernelSign sign, const KernelParams& params) {
  // min over a of 2 a h + 2 / (pi^2 rho a), h = 2 eta + rho
  (void)sign;
  const double h = 2 * params.eta + params.rho;
  return 4 / kPi * std::sqrt(h / params.rho);
}

double kernel_ft_quadrature(KernelSign sign, double t, const KernelParams& params, double cutoff) {
  const double rho = params.rho;
  const double w = params.width(sign);
  const double A = cutoff / rho;
  // Fastest angular frequency in cos(2 pi t a) sin(pi rho a) sin(pi w a).
  const double omega = kPi * (2 * std::fabs(t) + rho + w);
  const auto panels = static_cast<std::size_t>(std::ceil(omega * A / (2 * kPi))) + 1;
  auto f = [&](double a) { return std::cos(2 * kPi * t * a) * kernel(sign, a, params); };
  const double body = 2 * composite_gauss<double>(f, 0, A, panels, 16);
  // Beyond A: the integrand is a sum of four cos(w_i a) / a^2 terms.
  const double b = kPi * rho, c = kPi * w, a0 = 2 * kPi * t;
  const double tail = (cos_over_square_tail(a0 + b - c, A) + cos_over_square_tail(a0 - b + c, A) -
                       cos_over_square_tail(a0 + b + c, A) - cos_over_square_tail(a0 - b - c, A)) *
                      2 / (4 * kPi * kPi * rho);
  return body + tail;
}

std::vector<SandwichPoint> sandwich_grid(const KernelParams& params, double cutoff) {
  std::vector<SandwichPoint> out;
  const double eta = params.eta;
  for (int i = -100; i <= 100; ++i) {
    SandwichPoint p{};
    p.t = eta * i / 50.0;
    p.ft_minus = kernel_ft(KernelSign::minus, p.t, params);
    p.ft_plus = kernel_ft(KernelSign::plus, p.t, params);
    p.band = band_indicator(p.t, eta);
    p.quad_minus = kernel_ft_quadrature(KernelSign::minus, p.t, params, cutoff);
    p.quad_plus = kernel_ft_quadrature(KernelSign::plus, p.t, params, cutoff);
    p.ordered = 0 <= p.ft_minus && p.ft_minus <= p.band && p.band <= p.ft_plus && p.ft_plus <= 1;
    p.max_mismatch = std::max(std::fabs(p.ft_minus - p.quad_minus), std::fabs(p.ft_plus - p.quad_plus));
    out.push_back(p);
  }
  return out;
}

}  // namespace shiftlab
