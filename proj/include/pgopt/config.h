#ifndef PGOPT_CONFIG_H_
#define PGOPT_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgopt/train.h"

namespace pgopt {

// Raised for any invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

const std::vector<std::string>& ExperimentNames();

struct GeneratorParams {
  // simple-misspec, zeroth-compare
  double m = 0.0;
  double alpha = 1.0;
  double noise_multiplier = 1.0;  // scales eps_alpha; 0 gives noiseless data
  // shortest-random, shortest-planted, h-sensitivity
  std::string noise = "add-gaussian";
  std::optional<uint64_t> bstar_seed;  // derived from the master seed if unset
  // portfolio
  std::string returns_path;  // empty: built-in synthetic history
  bool returns_in_percent = false;
  double noise_scale = 0.5;
};

struct ZerothParams {
  double slope = -0.1;
  double beta_min = -1.0;
  double beta_max = 1.0;
  double beta_step = 0.01;
  std::optional<double> h;  // default 1 / sqrt(n)
};

struct ExperimentConfig {
  std::string experiment;
  // eto, spo-plus, pgb, pgc, pgf; zeroth-compare takes decision, pgb, pgc, pgf.
  std::vector<std::string> methods;
  std::vector<int> n;
  int trials = 20;
  uint64_t seed = 0;
  int test_size = 10000;
  bool record_timing = false;
  GeneratorParams generator;
  TrainConfig train;
  std::vector<double> h_values;  // h-sensitivity only
  ZerothParams zeroth;
};

// Defaults for a named experiment; throws ConfigError for unknown names.
ExperimentConfig DefaultConfig(const std::string& experiment);

// Parses TOML text (top-level `experiment` selects the defaults that the
// remaining keys override). Unknown keys and keys that do not apply to the
// chosen experiment are rejected.
ExperimentConfig ParseConfigToml(const std::string& text);
ExperimentConfig LoadConfigFile(const std::string& path);

// Cross-field checks (methods valid for the experiment, n >= 1, ...).
void ValidateConfig(const ExperimentConfig& config);

}  // namespace pgopt

#endif  // PGOPT_CONFIG_H_
