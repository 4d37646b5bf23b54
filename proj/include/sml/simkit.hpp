#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "sml/adaptive.hpp"

// System-identification experiments: white Gaussian input through a
// ground-truth product-of-FIR plant plus measurement noise, identified
// online, with the excess mean-square error averaged over an ensemble of
// independent realizations.

namespace sml {

enum class Algorithm { kSmlLms, kVolterraLms };

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// Ground-truth plant description: freshly drawn Gaussian factors
// (unit-norm per factor, output power normalized to ~1) or explicit
// factor vectors taken verbatim.
struct PlantSpec {
  bool random = true;
  std::vector<Vec> factors;  // used when !random
};

struct ExperimentConfig {
  int length = 0;  // M
  int order = 0;   // K
  long n_iters = 0;
  int n_realizations = 0;
  double noise_var = 0.0;
  double mu = 0.0;
  std::uint64_t plant_seed = 0;
  std::uint64_t signal_seed = 0;
  PlantSpec plant_spec;
  Algorithm algorithm = Algorithm::kSmlLms;
  bool algorithm_set = false;                 // true when the config named `algorithm`
  std::vector<Algorithm> compare_algorithms;  // from `algorithms =`, for compare runs
  InitScheme init = InitScheme::kTable;
  bool allow_divergence = false;
  std::optional<double> target_emse_db;
  std::optional<double> mu_sml;       // per-algorithm step-size overrides
  std::optional<double> mu_volterra;

  // mu for one algorithm, honoring the overrides.
  double mu_for(Algorithm a) const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Key-value config file: `key = value` lines, '#' comments. Unknown keys
// are errors, as is a missing or unsupported schema_version.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_text(const ExperimentConfig& cfg);

// i.i.d. standard normal input samples; identical seeds give identical
// sequences.
Vec gen_input(std::size_t n, std::uint64_t seed);

// Plant from the config. Random plants draw K Gaussian factors of length
// M, normalize each to unit norm, then apply one global gain so that the
// plant output power over probe regressors is ~1. Explicit factors pass
// through untouched.
Plant gen_plant(const ExperimentConfig& cfg);

// Gaussian factor draws before the global gain; each has unit norm.
std::vector<Vec> random_unit_factors(int order, int length, std::uint64_t seed);

// d(i) = plant output + measurement noise with variance plant.noise_var,
// from a noise stream independent of the input.
Vec synth_desired(const Plant& plant, const Vec& inputs, std::uint64_t noise_seed);

// Per-iteration ensemble-averaged excess mean-square error.
struct EmseCurve {
  std::vector<double> values;  // linear scale

  std::vector<double> db() const;  // 10*log10 view
  // dB of the mean over the trailing fraction of iterations.
  double steady_state_db(double tail_fraction = 0.10) const;
};

// Test hooks for degenerate ensembles.
struct EnsembleHooks {
  bool freeze_at_plant = false;  // no adaptation; weights pinned to the plant
  bool init_zero = false;        // all-zero initial weights
};

struct EnsembleResult {
  EmseCurve curve;
  Plant plant;
  int divergence_count = 0;
  int realizations_used = 0;
  double mu_used = 0.0;
};

// Runs cfg.n_realizations independent realizations against one fixed
// plant and averages the squared a-priori excess error per iteration.
// The excess uses the pre-update weights of each step. With serial=true
// realizations run in order on one thread (bit-exact reproduction);
// otherwise they are partitioned over threads by index, which changes
// only the reduction order of the final sums.
EnsembleResult emse_ensemble(const ExperimentConfig& cfg, bool serial = true,
                             const EnsembleHooks& hooks = {});

// CSV with columns iter,emse_linear,emse_db; 17 significant digits.
void write_emse_csv(const EmseCurve& curve, const std::string& path);
EmseCurve read_emse_csv(const std::string& path);

}  // namespace sml
