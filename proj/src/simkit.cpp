#include "sml/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "csv_util.hpp"
#include "sml/rng.hpp"

namespace sml {

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kSmlLms: return "sml-lms";
    case Algorithm::kVolterraLms: return "volterra-lms";
  }
  throw std::logic_error("algorithm_name: bad enum");
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "sml-lms") return Algorithm::kSmlLms;
  if (name == "volterra-lms") return Algorithm::kVolterraLms;
  throw ConfigError("unknown algorithm '" + name + "' (expected sml-lms or volterra-lms)");
}

double ExperimentConfig::mu_for(Algorithm a) const {
  if (a == Algorithm::kSmlLms && mu_sml) return *mu_sml;
  if (a == Algorithm::kVolterraLms && mu_volterra) return *mu_volterra;
  return mu;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

long parse_long(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "': expected integer, got '" + value + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
    throw ConfigError("key '" + key + "': expected unsigned integer, got '" + value + "'");
  return v;
}

double parse_double(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw ConfigError("key '" + key + "': expected number, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

Vec parse_vector(const std::string& key, const std::string& value) {
  Vec out;
  std::istringstream ss(value);
  std::string tok;
  while (ss >> tok) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
      throw ConfigError("key '" + key + "': bad vector entry '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty vector");
  return out;
}

std::vector<Algorithm> parse_algorithms(const std::string& value) {
  std::vector<Algorithm> out;
  std::string item;
  std::istringstream ss(value);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(algorithm_from_name(item));
  }
  if (out.empty()) throw ConfigError("key 'algorithms': no algorithms listed");
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.length < 1) throw ConfigError("M must be >= 1");
  if (cfg.order < 1) throw ConfigError("K must be >= 1");
  if (cfg.n_iters < 1) throw ConfigError("n_iters must be >= 1");
  if (cfg.n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
  if (!(cfg.noise_var >= 0.0) || !std::isfinite(cfg.noise_var))
    throw ConfigError("noise_var must be finite and >= 0");
  if (!(cfg.mu > 0.0) || !std::isfinite(cfg.mu)) throw ConfigError("mu must be > 0");
  if (cfg.mu_sml && !(*cfg.mu_sml > 0.0)) throw ConfigError("mu_sml must be > 0");
  if (cfg.mu_volterra && !(*cfg.mu_volterra > 0.0))
    throw ConfigError("mu_volterra must be > 0");
  if (!cfg.plant_spec.random) {
    if (static_cast<int>(cfg.plant_spec.factors.size()) != cfg.order)
      throw ConfigError("explicit plant needs exactly K = " + std::to_string(cfg.order) +
                        " factor_<j> vectors");
    for (const Vec& f : cfg.plant_spec.factors) {
      if (static_cast<int>(f.size()) != cfg.length)
        throw ConfigError("explicit plant factors must have length M = " +
                          std::to_string(cfg.length));
      for (double v : f)
        if (!std::isfinite(v)) throw ConfigError("explicit plant factor has nonfinite entry");
    }
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<int, Vec> explicit_factors;
  bool saw_version = false, saw_m = false, saw_k = false, saw_iters = false,
       saw_reals = false, saw_noise = false, saw_mu = false, saw_plant_seed = false,
       saw_signal_seed = false, saw_plant = false, saw_algorithm = false,
       saw_algorithms = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");

    if (key == "schema_version") {
      if (parse_long(key, value) != 1)
        throw ConfigError("unsupported schema_version '" + value + "' (expected 1)");
      saw_version = true;
    } else if (key == "M") {
      cfg.length = static_cast<int>(parse_long(key, value));
      saw_m = true;
    } else if (key == "K") {
      cfg.order = static_cast<int>(parse_long(key, value));
      saw_k = true;
    } else if (key == "n_iters") {
      cfg.n_iters = parse_long(key, value);
      saw_iters = true;
    } else if (key == "n_realizations") {
      cfg.n_realizations = static_cast<int>(parse_long(key, value));
      saw_reals = true;
    } else if (key == "noise_var") {
      cfg.noise_var = parse_double(key, value);
      saw_noise = true;
    } else if (key == "mu") {
      cfg.mu = parse_double(key, value);
      saw_mu = true;
    } else if (key == "mu_sml") {
      cfg.mu_sml = parse_double(key, value);
    } else if (key == "mu_volterra") {
      cfg.mu_volterra = parse_double(key, value);
    } else if (key == "plant_seed") {
      cfg.plant_seed = parse_u64(key, value);
      saw_plant_seed = true;
    } else if (key == "signal_seed") {
      cfg.signal_seed = parse_u64(key, value);
      saw_signal_seed = true;
    } else if (key == "plant") {
      if (value == "random") {
        cfg.plant_spec.random = true;
      } else if (value == "explicit") {
        cfg.plant_spec.random = false;
      } else {
        throw ConfigError("key 'plant': expected random or explicit, got '" + value + "'");
      }
      saw_plant = true;
    } else if (key == "algorithm") {
      cfg.algorithm = algorithm_from_name(value);
      cfg.algorithm_set = true;
      saw_algorithm = true;
    } else if (key == "algorithms") {
      cfg.compare_algorithms = parse_algorithms(value);
      saw_algorithms = true;
    } else if (key == "init") {
      if (value == "table") {
        cfg.init = InitScheme::kTable;
      } else if (value == "text-variant") {
        cfg.init = InitScheme::kTextVariant;
      } else {
        throw ConfigError("key 'init': expected table or text-variant, got '" + value + "'");
      }
    } else if (key == "allow_divergence") {
      cfg.allow_divergence = parse_bool(key, value);
    } else if (key == "target_emse_db") {
      cfg.target_emse_db = parse_double(key, value);
    } else if (key.rfind("factor_", 0) == 0) {
      const long idx = parse_long(key, key.substr(7));
      if (idx < 1) throw ConfigError("key '" + key + "': factor index must be >= 1");
      if (explicit_factors.count(static_cast<int>(idx)))
        throw ConfigError("duplicate key '" + key + "'");
      explicit_factors[static_cast<int>(idx)] = parse_vector(key, value);
    } else {
      throw ConfigError("unknown key '" + key + "'");
    }
  }

  if (!saw_version) throw ConfigError("missing required key 'schema_version'");
  if (!saw_m) throw ConfigError("missing required key 'M'");
  if (!saw_k) throw ConfigError("missing required key 'K'");
  if (!saw_iters) throw ConfigError("missing required key 'n_iters'");
  if (!saw_reals) throw ConfigError("missing required key 'n_realizations'");
  if (!saw_noise) throw ConfigError("missing required key 'noise_var'");
  if (!saw_mu) throw ConfigError("missing required key 'mu'");
  if (!saw_plant_seed) throw ConfigError("missing required key 'plant_seed'");
  if (!saw_signal_seed) throw ConfigError("missing required key 'signal_seed'");
  if (!saw_plant) throw ConfigError("missing required key 'plant'");
  if (!saw_algorithm && !saw_algorithms)
    throw ConfigError("missing key 'algorithm' (or 'algorithms' for comparison runs)");

  if (cfg.plant_spec.random && !explicit_factors.empty())
    throw ConfigError("factor_<j> keys are only allowed with plant = explicit");
  if (!cfg.plant_spec.random) {
    for (int j = 1; j <= cfg.order; ++j) {
      auto it = explicit_factors.find(j);
      if (it == explicit_factors.end())
        throw ConfigError("explicit plant: missing key 'factor_" + std::to_string(j) + "'");
      cfg.plant_spec.factors.push_back(it->second);
    }
    if (static_cast<int>(explicit_factors.size()) != cfg.order)
      throw ConfigError("explicit plant: more factor_<j> keys than K");
  }

  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "schema_version = 1\n";
  out << "M = " << cfg.length << "\n";
  out << "K = " << cfg.order << "\n";
  out << "n_iters = " << cfg.n_iters << "\n";
  out << "n_realizations = " << cfg.n_realizations << "\n";
  out << "noise_var = " << detail::fmt17(cfg.noise_var) << "\n";
  out << "mu = " << detail::fmt17(cfg.mu) << "\n";
  if (cfg.mu_sml) out << "mu_sml = " << detail::fmt17(*cfg.mu_sml) << "\n";
  if (cfg.mu_volterra) out << "mu_volterra = " << detail::fmt17(*cfg.mu_volterra) << "\n";
  out << "plant_seed = " << cfg.plant_seed << "\n";
  out << "signal_seed = " << cfg.signal_seed << "\n";
  out << "plant = " << (cfg.plant_spec.random ? "random" : "explicit") << "\n";
  if (!cfg.plant_spec.random) {
    for (std::size_t j = 0; j < cfg.plant_spec.factors.size(); ++j) {
      out << "factor_" << (j + 1) << " =";
      for (double v : cfg.plant_spec.factors[j]) out << ' ' << detail::fmt17(v);
      out << "\n";
    }
  }
  if (!cfg.compare_algorithms.empty()) {
    out << "algorithms = ";
    for (std::size_t i = 0; i < cfg.compare_algorithms.size(); ++i)
      out << (i ? "," : "") << algorithm_name(cfg.compare_algorithms[i]);
    out << "\n";
  } else {
    out << "algorithm = " << algorithm_name(cfg.algorithm) << "\n";
  }
  out << "init = " << (cfg.init == InitScheme::kTable ? "table" : "text-variant") << "\n";
  out << "allow_divergence = " << (cfg.allow_divergence ? "true" : "false") << "\n";
  if (cfg.target_emse_db)
    out << "target_emse_db = " << detail::fmt17(*cfg.target_emse_db) << "\n";
  return out.str();
}

Vec gen_input(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("gen_input: n must be >= 1");
  return gaussian_vector(n, seed);
}

std::vector<Vec> random_unit_factors(int order, int length, std::uint64_t seed) {
  if (order < 1 || length < 1)
    throw std::invalid_argument("random_unit_factors: order and length must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vec> factors(static_cast<std::size_t>(order),
                           Vec(static_cast<std::size_t>(length)));
  for (Vec& f : factors) {
    double norm2 = 0.0;
    for (double& v : f) {
      v = normal(rng);
      norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) throw std::runtime_error("random_unit_factors: degenerate draw");
    for (double& v : f) v /= norm;
  }
  return factors;
}

Plant gen_plant(const ExperimentConfig& cfg) {
  validate_config(cfg);
  if (!cfg.plant_spec.random)
    return Plant{FactorWeights{cfg.plant_spec.factors}, cfg.noise_var};

  FactorWeights w{random_unit_factors(cfg.order, cfg.length, derive_seed(cfg.plant_seed, 0))};

  // one global gain pinning the plant output power near 1
  constexpr int kProbes = 10000;
  std::mt19937_64 rng(derive_seed(cfg.plant_seed, 1));
  std::normal_distribution<double> normal(0.0, 1.0);
  Regressor u(static_cast<std::size_t>(cfg.length));
  double power = 0.0;
  for (int p = 0; p < kProbes; ++p) {
    for (double& v : u) v = normal(rng);
    const double y = output(u, w);
    power += y * y;
  }
  power /= kProbes;
  const double per_factor_gain = std::pow(power, -0.5 / cfg.order);
  for (Vec& f : w.factors)
    for (double& v : f) v *= per_factor_gain;
  return Plant{std::move(w), cfg.noise_var};
}

Vec synth_desired(const Plant& plant, const Vec& inputs, std::uint64_t noise_seed) {
  const int m = plant.factors.length();
  if (m < 1) throw std::invalid_argument("synth_desired: plant has no factors");
  if (!(plant.noise_var >= 0.0))
    throw std::invalid_argument("synth_desired: negative noise variance");
  const double sigma = std::sqrt(plant.noise_var);
  const Vec noise = gaussian_vector(inputs.size(), noise_seed);
  Vec desired(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i)
    desired[i] = output(regressor_at(inputs, i, m), plant.factors) + sigma * noise[i];
  return desired;
}

std::vector<double> EmseCurve::db() const {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = 10.0 * std::log10(values[i]);
  return out;
}

double EmseCurve::steady_state_db(double tail_fraction) const {
  if (values.empty()) throw std::logic_error("steady_state_db: empty curve");
  const std::size_t tail = std::max<std::size_t>(
      1, static_cast<std::size_t>(static_cast<double>(values.size()) * tail_fraction));
  double acc = 0.0;
  for (std::size_t i = values.size() - tail; i < values.size(); ++i) acc += values[i];
  return 10.0 * std::log10(acc / static_cast<double>(tail));
}

namespace {

struct RealizationFailure {
  int realization = -1;
  long iteration = 0;
  std::string message;
};

struct BlockResult {
  std::vector<double> sum_sq;  // per-iteration sums over completed realizations
  int completed = 0;
  std::vector<RealizationFailure> failures;
};

std::unique_ptr<AdaptiveFilter> make_filter(const ExperimentConfig& cfg,
                                            const EnsembleHooks& hooks) {
  if (cfg.algorithm == Algorithm::kSmlLms) {
    auto f = std::make_unique<SmlLms>(cfg.order, cfg.length,
                                      cfg.mu_for(Algorithm::kSmlLms), cfg.init);
    if (hooks.init_zero) f->set_weights(zero_weights(cfg.order, cfg.length));
    return f;
  }
  return std::make_unique<VolterraLms>(cfg.order, cfg.length,
                                       cfg.mu_for(Algorithm::kVolterraLms));
}

BlockResult run_block(const ExperimentConfig& cfg, const Plant& plant,
                      const EnsembleHooks& hooks, int first, int last) {
  BlockResult block;
  block.sum_sq.assign(static_cast<std::size_t>(cfg.n_iters), 0.0);
  std::vector<double> one(static_cast<std::size_t>(cfg.n_iters), 0.0);
  for (int r = first; r < last; ++r) {
    const Vec inputs =
        gen_input(static_cast<std::size_t>(cfg.n_iters),
                  derive_seed(cfg.signal_seed, 2 * static_cast<std::uint64_t>(r)));
    const Vec desired = synth_desired(
        plant, inputs, derive_seed(cfg.signal_seed, 2 * static_cast<std::uint64_t>(r) + 1));
    try {
      if (hooks.freeze_at_plant) {
        for (long i = 0; i < cfg.n_iters; ++i) {
          const Regressor u = regressor_at(inputs, static_cast<std::size_t>(i), cfg.length);
          const double excess = output(u, plant.factors) - output(u, plant.factors);
          one[static_cast<std::size_t>(i)] = excess * excess;
        }
      } else {
        auto filter = make_filter(cfg, hooks);
        for (long i = 0; i < cfg.n_iters; ++i) {
          const Regressor u = regressor_at(inputs, static_cast<std::size_t>(i), cfg.length);
          const StepResult res = filter->step(u, desired[static_cast<std::size_t>(i)]);
          const double excess = output(u, plant.factors) - res.prediction;
          one[static_cast<std::size_t>(i)] = excess * excess;
        }
      }
    } catch (const DivergenceError& err) {
      block.failures.push_back({r, err.iteration(), err.detail()});
      continue;
    }
    for (long i = 0; i < cfg.n_iters; ++i)
      block.sum_sq[static_cast<std::size_t>(i)] += one[static_cast<std::size_t>(i)];
    ++block.completed;
  }
  return block;
}

}  // namespace

EnsembleResult emse_ensemble(const ExperimentConfig& cfg, bool serial,
                             const EnsembleHooks& hooks) {
  validate_config(cfg);
  EnsembleResult result;
  result.plant = gen_plant(cfg);
  result.mu_used = cfg.mu_for(cfg.algorithm);

  const int n_real = cfg.n_realizations;
  std::vector<BlockResult> blocks;
  if (serial || n_real == 1) {
    blocks.push_back(run_block(cfg, result.plant, hooks, 0, n_real));
  } else {
    const int n_threads = std::max(
        1, std::min<int>(static_cast<int>(std::thread::hardware_concurrency()), n_real));
    std::vector<std::future<BlockResult>> futures;
    for (int t = 0; t < n_threads; ++t) {
      const int first = static_cast<int>(static_cast<long>(n_real) * t / n_threads);
      const int last = static_cast<int>(static_cast<long>(n_real) * (t + 1) / n_threads);
      futures.push_back(std::async(std::launch::async, run_block, std::cref(cfg),
                                   std::cref(result.plant), std::cref(hooks), first, last));
    }
    for (auto& f : futures) blocks.push_back(f.get());
  }

  std::vector<double> total(static_cast<std::size_t>(cfg.n_iters), 0.0);
  int completed = 0;
  std::vector<RealizationFailure> failures;
  for (const BlockResult& b : blocks) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += b.sum_sq[i];
    completed += b.completed;
    failures.insert(failures.end(), b.failures.begin(), b.failures.end());
  }

  if (!failures.empty() && !cfg.allow_divergence) {
    const RealizationFailure& f = failures.front();
    throw DivergenceError(f.iteration,
                          f.message + " (realization " + std::to_string(f.realization) + ")");
  }
  if (completed == 0) throw std::runtime_error("emse_ensemble: all realizations diverged");

  result.divergence_count = static_cast<int>(failures.size());
  result.realizations_used = completed;
  result.curve.values.assign(total.begin(), total.end());
  for (double& v : result.curve.values) v /= static_cast<double>(completed);
  return result;
}

void write_emse_csv(const EmseCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_emse_csv: cannot open " + path);
  out << "iter,emse_linear,emse_db\n";
  const std::vector<double> db = curve.db();
  for (std::size_t i = 0; i < curve.values.size(); ++i)
    out << (i + 1) << ',' << detail::fmt17(curve.values[i]) << ',' << detail::fmt17(db[i])
        << '\n';
  if (!out) throw std::runtime_error("write_emse_csv: write failed for " + path);
}

EmseCurve read_emse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_emse_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "iter,emse_linear,emse_db")
    throw std::runtime_error("read_emse_csv: bad header in " + path);
  EmseCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> f = detail::parse_csv_row(line, 3, path);
    curve.values.push_back(f[1]);
  }
  return curve;
}

}  // namespace sml
