#pragma once

#include "shiftlab/counting.hpp"
#include "shiftlab/density.hpp"
#include "shiftlab/dioph.hpp"
#include "shiftlab/kernels.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shiftlab {

enum class ArcKind { major, minor, trivial };

std::string to_string(ArcKind k);

struct ArcLabel {
  ArcKind kind = ArcKind::major;
  Real norm;             // |alpha|, the sup norm
  Real major_threshold;  // P^{delta - d}
  Real T;
};

// major: |alpha| < P^{delta-d}; minor: P^{delta-d} <= |alpha| <= T(P);
// trivial: |alpha| > T(P).
ArcLabel classify(const std::vector<Real>& alpha, const Real& P, const DissectionParams& params,
                  const KernelParams& kernel);

struct RPlusMinusOptions {
  std::optional<double> A;            // default 10 T(P)
  std::optional<Rational> delta;      // default from dissection_params
  std::size_t nodes = 16;             // Gauss-Legendre nodes per panel
  double budget = 1e7;                // lattice points
  double work_budget = 1e9;           // lattice points times quadrature nodes
  unsigned threads = 1;
};

struct RPlusMinus {
  double minus = 0;        // R_- truncated to [-A, A]^R
  double plus = 0;         // R_+ truncated to [-A, A]^R
  double tail = 0;         // rigorous bound on the discarded region
  double quad_error = 0;   // |coarse - fine| quadrature estimate
  double closed_minus = 0; // sum_x ft_-(v_x): the untruncated value
  double closed_plus = 0;
  double A = 0;
  KernelParams kernel;
  std::uint64_t points = 0;
};

// R_pm(P) = int S(alpha) e(-alpha . tau) K_pm(alpha) over [-A, A]^R (R <= 2),
// with S summed through the shifted values v_x = f(x + mu 1) - tau.
RPlusMinus r_plus_minus(const FormSystem& system, const ShiftExpansion& exp, const IrrationalMu& mu,
                        const std::vector<Rational>& tau, const Rational& eta, std::int64_t P,
                        const RPlusMinusOptions& options = {});

// R_- - tail - err <= N <= R_+ + tail + err.
bool sandwich_holds(const RPlusMinus& r, std::uint64_t N);

struct ExperimentSpec {
  FormSystem system;
  IrrationalMu mu;
  std::vector<Rational> tau;
  Rational eta;
  std::vector<std::int64_t> Ps;
  std::optional<Rational> theta0;
  DensityOptions density;
  NewtonOptions newton;
  CountMethod method = CountMethod::automatic;
  CountOptions count;
  double tolerance = 0.15;
  // Run even when the hypotheses fail; the result is then never certified.
  bool waive_hypotheses = false;
  // R_pm checks for every P whose lattice and quadrature fit the budgets.
  bool sandwich = true;
  RPlusMinusOptions sandwich_options;
};

struct SandwichRow {
  std::int64_t P = 0;
  std::uint64_t N = 0;
  RPlusMinus r;
  bool holds = false;
};

struct ArcSample {
  std::int64_t P = 0;
  double alpha = 0;  // alpha along the diagonal direction (alpha, ..., alpha)
  ArcLabel label;
  std::optional<double> abs_S;
};

enum class VerifyStatus { pass, fail, no_target, refused };

std::string to_string(VerifyStatus s);

struct VerifyReport {
  HypothesisReport hypotheses;
  bool certified = false;  // hypotheses hold and no boundary flags
  bool waived = false;
  DissectionParams params;
  std::optional<RealZero> zero;
  DensityEstimate density;
  std::vector<SeriesRow> series;
  bool within_tolerance = false;
  bool monotone = false;  // |ratio - 1| nonincreasing from the second P on
  bool ratios_stall = false;
  std::vector<SandwichRow> sandwich;
  std::vector<SandwichPoint> kernel_grid;
  std::vector<ArcSample> arcs;
  VerifyStatus status = VerifyStatus::fail;
  std::string message;
};

VerifyReport verify_asymptotic(const ExperimentSpec& spec);

std::string report_json(const VerifyReport& report);
std::string sandwich_csv(const std::vector<SandwichRow>& rows);
std::string arcs_csv(const std::vector<ArcSample>& arcs);
std::string kernel_grid_csv(const std::vector<SandwichPoint>& grid);

// summary.json, ratios.csv, sandwich.csv, arcs.csv, kernel_grid.csv.
void write_bundle(const VerifyReport& report, const std::string& directory);

}  // namespace shiftlab
