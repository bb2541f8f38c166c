#include "shiftlab/dissection.hpp"

#include "shiftlab/parallel.hpp"
#include "shiftlab/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace shiftlab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

}  // namespace

std::string to_string(ArcKind k) {
  switch (k) {
    case ArcKind::major:
      return "major";
    case ArcKind::minor:
      return "minor";
    case ArcKind::trivial:
      return "trivial";
  }
  return "?";
}

ArcLabel classify(const std::vector<Real>& alpha, const Real& P, const DissectionParams& params,
                  const KernelParams& kernel) {
  if (P < 1) throw InvalidArgument("classify needs P >= 1");
  ArcLabel out;
  out.norm = 0;
  for (const auto& a : alpha) out.norm = std::max(out.norm, Real(abs(a)));
  out.major_threshold = pow(P, to_real(params.delta - Rational(params.d)));
  out.T = Real(kernel.T);
  if (out.norm < out.major_threshold) {
    out.kind = ArcKind::major;
  } else if (out.norm <= out.T) {
    out.kind = ArcKind::minor;
  } else {
    out.kind = ArcKind::trivial;
  }
  return out;
}

RPlusMinus r_plus_minus(const FormSystem& system, const ShiftExpansion& exp, const IrrationalMu& mu,
                        const std::vector<Rational>& tau, const Rational& eta, std::int64_t P,
                        const RPlusMinusOptions& options) {
  const std::size_t R = system.R(), n = system.n();
  if (R > 2) throw InvalidArgument("r_plus_minus supports R <= 2");
  if (tau.size() != R) throw DimensionMismatch("r_plus_minus: tau has the wrong length");
  if (P < 1) throw InvalidArgument("r_plus_minus needs P >= 1");
  const double points = std::pow(2.0 * static_cast<double>(P) + 1, static_cast<double>(n));
  if (points > options.budget) throw BudgetExceeded("r_plus_minus: lattice exceeds the budget");
  if (options.nodes < 2) throw InvalidArgument("r_plus_minus needs at least 2 nodes per panel");

  const Rational delta = options.delta ? *options.delta : dissection_params(exp).delta;
  RPlusMinus out;
  out.kernel = kernel_params(to_double(eta), static_cast<double>(P), delta);
  out.A = options.A ? *options.A : 10 * out.kernel.T;
  if (!(out.A > 0)) throw InvalidArgument("r_plus_minus needs A > 0");
  out.points = static_cast<std::uint64_t>(points);

  const KernelParams& kp = out.kernel;
  // One panel per half turn of the fastest oscillation.
  auto panels_for = [&](double vbound) {
    const double turns = out.A * (vbound + kp.width(KernelSign::plus) + kp.rho);
    return std::max<std::size_t>(4, static_cast<std::size_t>(std::ceil(2 * turns)));
  };
  // Coarse plus fine pass: 3 base grids per axis, the second axis twice as long.
  auto work_for = [&](std::size_t panels) {
    const double axis = 3.0 * static_cast<double>(panels * options.nodes);
    return points * (R == 1 ? axis : 2 * axis * axis);
  };
  // With v = 0 the panel count is smallest, so this rejects an over-budget
  // call before it pays for the lattice evaluation.
  if (work_for(panels_for(0)) > options.work_budget)
    throw BudgetExceeded("r_plus_minus: quadrature exceeds the work budget");

  // v_x = f(x + mu 1) - tau in 100-digit arithmetic, then rounded.
  std::vector<std::vector<double>> v(R);
  double vmax = 0;
  {
    std::vector<std::int64_t> x(n, -P);
    std::vector<Real> shifted(n);
    while (true) {
      for (std::size_t i = 0; i < n; ++i) shifted[i] = Real(x[i]) + mu.value();
      for (std::size_t k = 0; k < R; ++k) {
        const double val = static_cast<double>(eval_form(system.form(k), shifted) - to_real(tau[k]));
        v[k].push_back(val);
        vmax = std::max(vmax, std::fabs(val));
      }
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
  }
  const std::size_t count = v[0].size();
  for (std::size_t i = 0; i < count; ++i) {
    double fm = 1, fp = 1;
    for (std::size_t k = 0; k < R; ++k) {
      fm *= kernel_ft(KernelSign::minus, v[k][i], kp);
      fp *= kernel_ft(KernelSign::plus, v[k][i], kp);
    }
    out.closed_minus += fm;
    out.closed_plus += fp;
  }

  const std::size_t base_panels = panels_for(vmax);
  const unsigned threads = options.threads;
  if (work_for(base_panels) > options.work_budget)
    throw BudgetExceeded("r_plus_minus: quadrature exceeds the work budget");

  // Returns (R_-, R_+) from a composite rule with the given panel count.
  auto integrate = [&](std::size_t panels) -> std::pair<double, double> {
    const GaussRule& rule = gauss_legendre(options.nodes);
    const std::size_t m = options.nodes;
    std::vector<double> nodes, weights;
    if (R == 1) {
      // S e(-alpha tau) K is even in its real part and odd in its imaginary
      // part, so R_pm = 2 int_0^A Re(...) K.
      const double h = out.A / static_cast<double>(panels);
      for (std::size_t p = 0; p < panels; ++p)
        for (std::size_t i = 0; i < m; ++i) {
          nodes.push_back(h * (static_cast<double>(p) + 0.5) + h / 2 * rule.nodes[i]);
          weights.push_back(h / 2 * rule.weights[i]);
        }
      auto chunk = [&](std::size_t c) {
        std::pair<double, double> acc{0, 0};
        for (std::size_t q = c * m; q < (c + 1) * m; ++q) {
          const double a = nodes[q];
          double s = 0;
          for (double val : v[0]) s += std::cos(kTwoPi * a * val);
          acc.first += weights[q] * s * kernel(KernelSign::minus, a, kp);
          acc.second += weights[q] * s * kernel(KernelSign::plus, a, kp);
        }
        return acc;
      };
      std::pair<double, double> total{0, 0};
      for (const auto& part : parallel_map<std::pair<double, double>>(panels, threads, chunk)) {
        total.first += part.first;
        total.second += part.second;
      }
      return {2 * total.first, 2 * total.second};
    }
    // R = 2: alpha_1 in [0, A], alpha_2 in [-A, A], doubled.
    const double h1 = out.A / static_cast<double>(panels);
    const double h2 = 2 * out.A / static_cast<double>(2 * panels);
    std::vector<double> n1, w1, n2, w2;
    for (std::size_t p = 0; p < panels; ++p)
      for (std::size_t i = 0; i < m; ++i) {
        n1.push_back(h1 * (static_cast<double>(p) + 0.5) + h1 / 2 * rule.nodes[i]);
        w1.push_back(h1 / 2 * rule.weights[i]);
      }
    for (std::size_t p = 0; p < 2 * panels; ++p)
      for (std::size_t i = 0; i < m; ++i) {
        n2.push_back(-out.A + h2 * (static_cast<double>(p) + 0.5) + h2 / 2 * rule.nodes[i]);
        w2.push_back(h2 / 2 * rule.weights[i]);
      }
    auto row = [&](std::size_t q) {
      std::pair<double, double> acc{0, 0};
      const double a1 = n1[q];
      const double km1 = kernel(KernelSign::minus, a1, kp), kp1 = kernel(KernelSign::plus, a1, kp);
      for (std::size_t r = 0; r < n2.size(); ++r) {
        const double a2 = n2[r];
        double s = 0;
        for (std::size_t i = 0; i < count; ++i) s += std::cos(kTwoPi * (a1 * v[0][i] + a2 * v[1][i]));
        acc.first += w2[r] * s * kernel(KernelSign::minus, a2, kp);
        acc.second += w2[r] * s * kernel(KernelSign::plus, a2, kp);
      }
      return std::pair<double, double>{w1[q] * acc.first * km1, w1[q] * acc.second * kp1};
    };
    std::pair<double, double> total{0, 0};
    for (const auto& part : parallel_map<std::pair<double, double>>(n1.size(), threads, row)) {
      total.first += part.first;
      total.second += part.second;
    }
    return {2 * total.first, 2 * total.second};
  };

  const auto coarse = integrate(base_panels);
  const auto fine = integrate(2 * base_panels);
  out.minus = fine.first;
  out.plus = fine.second;
  out.quad_error = std::max(std::fabs(fine.first - coarse.first), std::fabs(fine.second - coarse.second));
  // Rounding v_x to double moves each phase by at most 2 pi A |v| u.
  const double l1 = std::max(kernel_l1_bound(KernelSign::minus, kp), kernel_l1_bound(KernelSign::plus, kp));
  out.quad_error += points * kTwoPi * out.A * vmax * 0x1p-52 * std::pow(l1, static_cast<double>(R));
  // |S| <= (2P+1)^n; outside the box at least one |alpha_k| > A.
  const double one_axis = kernel_tail(out.A, kp);
  out.tail = points * (R == 1 ? one_axis
                              : 2 * one_axis * std::max(kernel_l1_bound(KernelSign::minus, kp),
                                                        kernel_l1_bound(KernelSign::plus, kp)));
  return out;
}

bool sandwich_holds(const RPlusMinus& r, std::uint64_t N) {
  const double n = static_cast<double>(N);
  return r.minus - r.tail - r.quad_error <= n && n <= r.plus + r.tail + r.quad_error;
}

}  // namespace shiftlab
