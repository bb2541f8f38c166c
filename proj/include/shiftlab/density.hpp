#pragma once

#include "shiftlab/forms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace shiftlab {

// lambda_L(xi) = L max(0, 1 - L |xi|); integrates to 1 over the line.
double tent(double L, double xi);
double tent_product(double L, const std::vector<double>& xi);

// Double-precision evaluator of the forms and their Jacobian.
class CompiledSystem {
 public:
  explicit CompiledSystem(const FormSystem& system);

  std::size_t R() const { return R_; }
  std::size_t n() const { return n_; }
  void values(const double* t, double* out) const;
  // Row-major R x n.
  void jacobian(const double* t, double* out) const;

 private:
  struct Term {
    std::size_t form;
    double coeff;
    std::vector<std::uint32_t> exps;
  };
  std::size_t R_, n_;
  std::vector<Term> terms_;
};

struct TentEstimate {
  double L = 0;
  double value = 0;
  double std_error = 0;
  std::uint64_t samples = 0;
};

struct QmcOptions {
  std::uint64_t samples = 1 << 16;  // total across all shifts
  std::uint64_t seed = 1;
  unsigned shifts = 16;
  unsigned threads = 1;
};

// I_L over [-1,1]^n by Sobol points under independent random digital shifts;
// the standard error is the spread across shifts.
TentEstimate tent_integral(const FormSystem& system, double L, const QmcOptions& options = {});

// Several L at once on the same point set.
std::vector<TentEstimate> tent_integrals(const FormSystem& system, const std::vector<double>& Ls,
                                         const QmcOptions& options = {});

struct DensityEstimate {
  double c = 0;
  double std_error = 0;
  std::vector<TentEstimate> ladder;
  bool converged = false;
};

struct DensityOptions {
  std::vector<double> ladder{2, 4, 8, 16, 32, 64, 128, 256};
  double rel_tol = 1e-2;
  QmcOptions qmc;
};

// c is the last rung; converged when the last two rungs differ by less than
// max(2 sqrt(se1^2 + se2^2), rel_tol |c|).
DensityEstimate density(const FormSystem& system, const DensityOptions& options = {});

std::string density_json(const DensityEstimate& est);

struct RealZero {
  std::vector<double> point;
  double residual = 0;       // max_k |f_k(t)|
  double sigma_min = 0;      // smallest singular value, rows normalised
  unsigned attempt = 0;
};

struct NewtonOptions {
  unsigned attempts = 100;
  std::uint64_t seed = 1;
  unsigned max_iterations = 200;
  double residual_tol = 1e-10;
  double rank_tol = 1e-6;
};

// Damped Moore-Penrose Newton on the sphere |t|_2 = 1/2. Homogeneity lets
// every iterate be rescaled there, which keeps it interior and away from
// the origin.
std::optional<RealZero> find_nonsingular_real_zero(const FormSystem& system, const NewtonOptions& options = {});

// Smallest singular value of the row-normalised Jacobian at t.
double jacobian_sigma_min(const CompiledSystem& sys, const std::vector<double>& t);

}  // namespace shiftlab
