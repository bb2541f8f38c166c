#pragma once

#include "shiftlab/forms.hpp"
#include "shiftlab/mu.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace shiftlab {

enum class CountMethod { generic, diagonal_mitm, automatic };

std::string to_string(CountMethod m);
CountMethod parse_count_method(const std::string& s);

struct CountSpec {
  FormSystem system;
  ShiftExpansion expansion;
  IrrationalMu mu;
  std::vector<Rational> tau;
  Rational eta;
  std::int64_t P = 1;
  CountMethod method = CountMethod::automatic;
};

struct CountOptions {
  double budget = 2e9;  // lattice points (generic) or streamed half (mitm)
  unsigned threads = 1;
};

struct CountResult {
  // Points certainly inside every band. Flagged points are not included.
  std::uint64_t count = 0;
  std::int64_t P = 0;
  CountMethod method = CountMethod::generic;
  // Points whose membership could not be decided at mu's precision.
  std::uint64_t boundary_flags = 0;
  double seconds = 0;

  bool certified() const { return boundary_flags == 0; }
};

// Membership of a single point, decided in 100-digit interval arithmetic
// (exactly when mu is rational). Both count paths defer to it whenever their
// double-precision test is inconclusive.
Decision band_membership(const CountSpec& spec, const std::vector<std::int64_t>& x);

CountResult count_generic(const CountSpec& spec, const CountOptions& options = {});
CountResult count_diagonal_mitm(const CountSpec& spec, const CountOptions& options = {});
// automatic picks mitm for diagonal systems with R <= 2.
CountResult count(const CountSpec& spec, const CountOptions& options = {});

struct SeriesRow {
  std::int64_t P = 0;
  CountResult result;
  double main_term = 0;  // (2 eta)^R c P^{n - R d}
  double ratio = 0;      // N / main_term, +inf when the main term vanishes
  bool ratio_defined = false;
};

std::vector<SeriesRow> count_series(const CountSpec& spec, const std::vector<std::int64_t>& Ps, double c,
                                    const CountOptions& options = {});

std::string series_csv(const std::vector<SeriesRow>& rows);

}  // namespace shiftlab
