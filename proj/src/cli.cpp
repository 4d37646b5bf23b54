#include "sml/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sml/adaptive.hpp"
#include "sml/simkit.hpp"
#include "sml/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sml {

namespace {

std::uint32_t rol(std::uint32_t v, int n) { return (v << n) | (v >> (32 - n)); }

void sha1_block(std::uint32_t h[5], const unsigned char* p) {
  std::uint32_t w[80];
  for (int i = 0; i < 16; ++i)
    w[i] = (static_cast<std::uint32_t>(p[4 * i]) << 24) |
           (static_cast<std::uint32_t>(p[4 * i + 1]) << 16) |
           (static_cast<std::uint32_t>(p[4 * i + 2]) << 8) |
           static_cast<std::uint32_t>(p[4 * i + 3]);
  for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
  std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
  for (int i = 0; i < 80; ++i) {
    std::uint32_t f, kc;
    if (i < 20) {
      f = (b & c) | (~b & d);
      kc = 0x5A827999u;
    } else if (i < 40) {
      f = b ^ c ^ d;
      kc = 0x6ED9EBA1u;
    } else if (i < 60) {
      f = (b & c) | (b & d) | (c & d);
      kc = 0x8F1BBCDCu;
    } else {
      f = b ^ c ^ d;
      kc = 0xCA62C1D6u;
    }
    const std::uint32_t tmp = rol(a, 5) + f + e + kc + w[i];
    e = d;
    d = c;
    c = rol(b, 30);
    b = a;
    a = tmp;
  }
  h[0] += a;
  h[1] += b;
  h[2] += c;
  h[3] += d;
  h[4] += e;
}

std::string sha1_hex(const std::string& data) {
  std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
  std::string msg = data;
  const std::uint64_t bitlen = static_cast<std::uint64_t>(data.size()) * 8;
  msg.push_back('\x80');
  while (msg.size() % 64 != 56) msg.push_back('\0');
  for (int i = 7; i >= 0; --i)
    msg.push_back(static_cast<char>((bitlen >> (8 * i)) & 0xFF));
  for (std::size_t off = 0; off < msg.size(); off += 64)
    sha1_block(h, reinterpret_cast<const unsigned char*>(msg.data()) + off);
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (std::uint32_t v : h) out << std::setw(8) << v;
  return out.str();
}

std::string read_file_or_config_error(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

long probe_mult_per_iteration(const ExperimentConfig& cfg, Algorithm a) {
  const Regressor u(static_cast<std::size_t>(cfg.length), 0.0);
  if (a == Algorithm::kSmlLms) {
    SmlLms f(cfg.order, cfg.length, cfg.mu_for(a), cfg.init);
    f.step(u, 0.0);
    return f.mult_count_last();
  }
  VolterraLms f(cfg.order, cfg.length, cfg.mu_for(a));
  f.step(u, 0.0);
  return f.mult_count_last();
}

struct AlgorithmSummary {
  std::string name;
  double mu = 0.0;
  double steady_db = 0.0;
  std::optional<long> iters_to_target;
  double target_db = 0.0;
  long mult_per_iter = 0;
  int divergence_count = 0;
  int realizations_used = 0;
  std::string csv_path;
};

// First iteration (1-based) whose window-smoothed EMSE is at or below the
// target; the window is 51 iterations of the linear curve.
std::optional<long> iterations_to_target(const EmseCurve& curve, double target_db) {
  const std::size_t n = curve.values.size();
  const std::size_t half = 25;
  const double target_linear = std::pow(10.0, target_db / 10.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i > half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) acc += curve.values[j];
    if (acc / static_cast<double>(hi - lo) <= target_linear)
      return static_cast<long>(i + 1);
  }
  return std::nullopt;
}

AlgorithmSummary summarize(const ExperimentConfig& cfg, Algorithm a,
                           const EnsembleResult& res, const std::string& csv_path) {
  AlgorithmSummary s;
  s.name = algorithm_name(a);
  s.mu = res.mu_used;
  s.steady_db = res.curve.steady_state_db();
  s.target_db = cfg.target_emse_db ? *cfg.target_emse_db : s.steady_db + 3.0;
  s.iters_to_target = iterations_to_target(res.curve, s.target_db);
  s.mult_per_iter = probe_mult_per_iteration(cfg, a);
  s.divergence_count = res.divergence_count;
  s.realizations_used = res.realizations_used;
  s.csv_path = csv_path;
  return s;
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["M"] = cfg.length;
  j["K"] = cfg.order;
  j["n_iters"] = cfg.n_iters;
  j["n_realizations"] = cfg.n_realizations;
  j["noise_var"] = cfg.noise_var;
  j["mu"] = cfg.mu;
  if (cfg.mu_sml) j["mu_sml"] = *cfg.mu_sml;
  if (cfg.mu_volterra) j["mu_volterra"] = *cfg.mu_volterra;
  j["plant_seed"] = cfg.plant_seed;
  j["signal_seed"] = cfg.signal_seed;
  j["plant"] = cfg.plant_spec.random ? "random" : "explicit";
  if (!cfg.plant_spec.random) j["factors"] = cfg.plant_spec.factors;
  if (cfg.algorithm_set) j["algorithm"] = algorithm_name(cfg.algorithm);
  if (!cfg.compare_algorithms.empty()) {
    std::vector<std::string> names;
    for (Algorithm a : cfg.compare_algorithms) names.push_back(algorithm_name(a));
    j["algorithms"] = names;
  }
  j["init"] = cfg.init == InitScheme::kTable ? "table" : "text-variant";
  j["allow_divergence"] = cfg.allow_divergence;
  if (cfg.target_emse_db) j["target_emse_db"] = *cfg.target_emse_db;
  return j;
}

void write_manifest(const std::string& path, const std::string& command,
                    const ExperimentConfig& cfg, const std::string& config_hash,
                    const std::vector<AlgorithmSummary>& summaries, bool serial,
                    double wall_sec) {
  json j;
  j["tool"] = "smlfilt";
  j["manifest_version"] = 1;
  j["created_utc"] = utc_timestamp();
  j["command"] = command;
  j["serial"] = serial;
  j["wall_time_sec"] = wall_sec;
  j["config"] = config_json(cfg);
  j["config_hash"] = config_hash;
  j["algorithms"] = json::array();
  j["outputs"] = json::array();
  for (const AlgorithmSummary& s : summaries) {
    json a;
    a["name"] = s.name;
    a["mu"] = s.mu;
    a["steady_state_emse_db"] = s.steady_db;
    a["target_emse_db"] = s.target_db;
    if (s.iters_to_target)
      a["iterations_to_target"] = *s.iters_to_target;
    else
      a["iterations_to_target"] = nullptr;
    a["mult_per_iteration"] = s.mult_per_iter;
    a["divergence_count"] = s.divergence_count;
    a["realizations_used"] = s.realizations_used;
    a["csv"] = s.csv_path;
    j["algorithms"].push_back(a);
    j["outputs"].push_back(s.csv_path);
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest " + path);
  out << j.dump(2) << '\n';
}

void print_summary(const AlgorithmSummary& s) {
  std::cout << "  " << s.name << ": steady-state EMSE " << s.steady_db << " dB";
  if (s.iters_to_target)
    std::cout << ", reached " << s.target_db << " dB at iteration " << *s.iters_to_target;
  std::cout << ", " << s.mult_per_iter << " mult/iter";
  if (s.divergence_count > 0)
    std::cout << ", " << s.divergence_count << " diverged realizations excluded";
  std::cout << '\n';
}

int cmd_run(const std::string& config_path, const std::string& out_dir, bool serial,
            std::optional<std::uint64_t> seed_override) {
  const std::string raw = read_file_or_config_error(config_path);
  ExperimentConfig cfg = parse_config(raw);
  if (!cfg.algorithm_set)
    throw ConfigError("run requires an 'algorithm' key (use compare for algorithm lists)");
  if (seed_override) cfg.signal_seed = *seed_override;

  const auto t0 = std::chrono::steady_clock::now();
  const EnsembleResult res = emse_ensemble(cfg, serial);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  fs::create_directories(out_dir);
  const std::string csv_name = "emse_" + algorithm_name(cfg.algorithm) + ".csv";
  write_emse_csv(res.curve, (fs::path(out_dir) / csv_name).string());

  std::vector<AlgorithmSummary> summaries = {summarize(cfg, cfg.algorithm, res, csv_name)};
  write_manifest((fs::path(out_dir) / "manifest.json").string(), "run", cfg,
                 git_blob_sha1(raw), summaries, serial, wall);

  std::cout << "run complete (" << res.realizations_used << " realizations, "
            << cfg.n_iters << " iterations)\n";
  print_summary(summaries.front());
  return kExitOk;
}

int cmd_compare(const std::string& config_path, const std::string& out_dir, bool serial,
                std::optional<std::uint64_t> seed_override) {
  const std::string raw = read_file_or_config_error(config_path);
  ExperimentConfig cfg = parse_config(raw);
  if (cfg.compare_algorithms.size() < 2)
    throw ConfigError("compare requires an 'algorithms' key naming at least 2 algorithms");
  for (std::size_t i = 0; i < cfg.compare_algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.compare_algorithms.size(); ++j)
      if (cfg.compare_algorithms[i] == cfg.compare_algorithms[j])
        throw ConfigError("compare: algorithm list contains duplicates");
  if (seed_override) cfg.signal_seed = *seed_override;

  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  std::vector<AlgorithmSummary> summaries;
  for (Algorithm a : cfg.compare_algorithms) {
    ExperimentConfig one = cfg;
    one.algorithm = a;
    one.algorithm_set = true;
    const EnsembleResult res = emse_ensemble(one, serial);
    const std::string csv_name = "emse_" + algorithm_name(a) + ".csv";
    write_emse_csv(res.curve, (fs::path(out_dir) / csv_name).string());
    summaries.push_back(summarize(one, a, res, csv_name));
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest((fs::path(out_dir) / "manifest.json").string(), "compare", cfg,
                 git_blob_sha1(raw), summaries, serial, wall);

  std::cout << "comparison complete (" << cfg.n_iters << " iterations, "
            << cfg.n_realizations << " realizations per algorithm)\n";
  for (const AlgorithmSummary& s : summaries) print_summary(s);
  return kExitOk;
}

int cmd_verify(const std::string& scale, bool mutate_grad_sign) {
  VerifyOptions opts;
  opts.full = scale == "full";
  opts.mutate_grad_sign = mutate_grad_sign;
  const std::vector<CheckResult> results = run_verification(opts);
  bool all_pass = true;
  for (const CheckResult& r : results) {
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << " — " << r.detail << '\n';
    all_pass = all_pass && r.pass;
  }
  std::cout << (all_pass ? "all checks passed\n" : "some checks FAILED\n");
  return all_pass ? kExitOk : kExitVerifyFailure;
}

}  // namespace

std::string git_blob_sha1(const std::string& bytes) {
  return sha1_hex("blob " + std::to_string(bytes.size()) + '\0' + bytes);
}

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"smlfilt: multilinear (product-of-FIR) adaptive filtering toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  bool serial = false;
  std::optional<std::uint64_t> seed_override;

  CLI::App* run = app.add_subcommand("run", "run one experiment from a config file");
  run->add_option("config", config_path, "experiment config file")->required();
  run->add_option("--out", out_dir, "output directory (default: out)");
  run->add_flag("--serial", serial, "single-threaded, bit-exact ensemble");
  run->add_option("--seed-override", seed_override, "replace the config signal_seed");

  CLI::App* compare = app.add_subcommand("compare", "run >= 2 algorithms on one plant");
  compare->add_option("config", config_path, "experiment config file")->required();
  compare->add_option("--out", out_dir, "output directory (default: out)");
  compare->add_flag("--serial", serial, "single-threaded, bit-exact ensemble");
  compare->add_option("--seed-override", seed_override, "replace the config signal_seed");

  std::string scale = "small";
  bool mutate_grad_sign = false;
  CLI::App* verify = app.add_subcommand("verify", "run the self-check suite");
  verify->add_option("--scale", scale, "small or full (default: small)")
      ->check(CLI::IsMember({"small", "full"}));
  verify->add_flag("--mutate-grad-sign", mutate_grad_sign)->group("");

  std::vector<const char*> argv;
  argv.push_back("sml_cli");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir, serial, seed_override);
    if (compare->parsed()) return cmd_compare(config_path, out_dir, serial, seed_override);
    return cmd_verify(scale, mutate_grad_sign);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace sml
