#pragma once

#include "shiftlab/dissection.hpp"

#include <optional>
#include <string>
#include <vector>

namespace shiftlab {

// One experiment, read from a JSON document whose numeric literals are all
// strings so that rationals survive unrounded. Booleans stay JSON booleans.
struct ExperimentConfig {
  explicit ExperimentConfig(FormSystem sys) : system(std::move(sys)) {}

  std::string system_source;  // path, or "inline"
  FormSystem system;
  IrrationalMu mu;
  std::vector<Rational> tau;
  Rational eta;
  std::vector<std::int64_t> Ps;
  std::optional<Rational> theta0;
  DensityOptions density;
  NewtonOptions newton;
  CountMethod method = CountMethod::automatic;
  double tolerance = 0.15;
  bool waive_hypotheses = false;
  bool sandwich = true;
  std::optional<double> sandwich_A;
  // Density used for count ratios when the density step is skipped.
  std::optional<double> c;
  // Frequency probes for expsum and approx, taken at the single box size
  // probe_P (default: the first P).
  std::vector<std::vector<Real>> alphas;
  std::int64_t probe_P = 0;
  std::string out_dir = "shiftlab_out";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double budget = 2e9;
};

// Errors are ParseError tagged with the offending key, e.g. "config.eta: ...".
// Relative system paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

struct ConfigOverrides {
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> budget;
};

// Seeds and thread counts fan out to every module that takes them.
void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

ExperimentSpec to_experiment(const ExperimentConfig& config);
CountSpec to_count_spec(const ExperimentConfig& config, std::int64_t P);

}  // namespace shiftlab
