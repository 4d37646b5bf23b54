// Acceptance suite: end-to-end checks of the library's contracts, one
// printed line per criterion. Returns nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "oracles.hpp"
#include "sml/adaptive.hpp"
#include "sml/simkit.hpp"

using namespace sml;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s  %2d  %s  [%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// Step sizes and seeds for the Monte-Carlo cases. The reference
// experiments leave the step sizes unspecified, so they are tuned here
// for clean convergence at the configured desk scales and pinned.
constexpr double kMuCaseI = 0.005;
constexpr double kMuCaseII = 0.0025;
constexpr double kMuCaseIV = 0.0015;
constexpr double kMuCompareSml = 0.005;
constexpr double kMuCompareVolterra = 0.0022;
constexpr std::uint64_t kCaseIVPlantSeed = 42;

ExperimentConfig case_config(int order, double noise_var, double mu, long n_iters,
                             int n_realizations) {
  ExperimentConfig cfg;
  cfg.length = 10;
  cfg.order = order;
  cfg.n_iters = n_iters;
  cfg.n_realizations = n_realizations;
  cfg.noise_var = noise_var;
  cfg.mu = mu;
  cfg.plant_seed = 101;
  cfg.signal_seed = 2024;
  cfg.algorithm = Algorithm::kSmlLms;
  cfg.algorithm_set = true;
  return cfg;
}

// Mean of the dB curve over [first, first+width).
double window_mean_db(const std::vector<double>& db, std::size_t first, std::size_t width) {
  double acc = 0.0;
  for (std::size_t i = first; i < first + width; ++i) acc += db[i];
  return acc / static_cast<double>(width);
}

// Average dB-per-iteration slope across [a, b), estimated from 50-wide
// windows at both ends.
double slope_db(const std::vector<double>& db, std::size_t a, std::size_t b) {
  const std::size_t w = 50;
  const double head = window_mean_db(db, a, w);
  const double tail = window_mean_db(db, b - w, w);
  return (tail - head) / static_cast<double>(b - w - a);
}

void criterion_gradient_fd() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(314159);
  std::uniform_int_distribution<int> mdist(1, 4), kdist(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = mdist(rng), k = kdist(rng);
    const MomentSet mom = oracle::moments_from_random_data(rng, k, m, 40);
    const FactorWeights w = oracle::random_weights(rng, k, m);
    const double rel =
        oracle::stacked_rel_error(grad(w, mom), oracle::fd_gradient(w, mom, 1e-6));
    worst = std::max(worst, rel);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "closed-form gradient vs central finite differences",
         worst < 1e-5 && secs < 30.0,
         "max rel err " + fmt(worst) + " over 200 draws, " + fmt(secs) + " s");
}

void criterion_kron_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(271828);
  std::uniform_int_distribution<int> mdist(1, 5), kdist(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = mdist(rng), k = kdist(rng);
    const FactorWeights w = oracle::random_weights(rng, k, m);
    const Regressor u = oracle::random_vec(rng, static_cast<std::size_t>(m));
    const double diff =
        std::abs(output(u, w) - contract(kron_power(u, k), simple_tensor(w.factors)));
    worst = std::max(worst, diff);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(2, "product form vs brute-force Kronecker contraction",
         worst <= 1e-10 && secs < 10.0,
         "max abs err " + fmt(worst) + " over 1000 instances, " + fmt(secs) + " s");
}

void criterion_update_consistency() {
  std::mt19937_64 rng(161803);
  std::uniform_int_distribution<int> mdist(2, 4), kdist(1, 3);
  std::uniform_real_distribution<double> mudist(1e-3, 0.5);
  int failed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = mdist(rng), k = kdist(rng);
    SmlLms filter(k, m, mudist(rng));
    filter.set_weights(oracle::random_weights(rng, k, m));
    if (!sml_step_matches_gradient(filter, oracle::random_vec(rng, static_cast<std::size_t>(m)),
                                   oracle::random_vec(rng, 1)[0], 1e-10))
      ++failed;
  }
  report(3, "update increments equal -mu x instantaneous gradient estimate", failed == 0,
         std::to_string(100 - failed) + "/100 states within 1e-10");
}

void criterion_mult_census() {
  std::mt19937_64 rng(577215);
  bool ok = sml_mult_census(10, 2) == 44;
  for (int m = 2; m <= 10 && ok; ++m) {
    for (int k = 2; k <= 4 && ok; ++k) {
      SmlLms filter(k, m, 1e-3);
      for (int i = 0; i < 2 && ok; ++i) {
        filter.step(oracle::random_vec(rng, static_cast<std::size_t>(m)),
                    oracle::random_vec(rng, 1)[0]);
        ok = filter.mult_count_last() == sml_mult_census(m, k);
      }
    }
  }
  report(4, "multiplication census M*K+K^2-K+2*M+2 exact on M=2..10, K=2..4", ok,
         "census(10,2) = " + std::to_string(sml_mult_census(10, 2)));
}

void criterion_zero_fixed_point() {
  std::mt19937_64 rng(141421);
  bool ok = true;
  for (const auto& [m, k] : {std::pair{6, 2}, std::pair{3, 3}}) {
    SmlLms filter(k, m, 0.1);
    filter.set_weights(zero_weights(k, m));
    for (int i = 0; i < 100; ++i)
      filter.step(oracle::random_vec(rng, static_cast<std::size_t>(m)),
                  oracle::random_vec(rng, 1)[0]);
    for (const Vec& f : filter.weights().factors)
      for (double v : f) ok = ok && v == 0.0;
  }
  report(5, "all-zero weights stay identically zero over 100 random steps", ok,
         ok ? "exact zeros" : "weights moved");
}

void criterion_planted_solution() {
  std::mt19937_64 rng(662607);
  const FactorWeights plant = oracle::random_weights(rng, 2, 4);
  std::vector<Regressor> regs;
  Vec desired;
  for (int i = 0; i < 2000; ++i) {
    regs.push_back(oracle::random_vec(rng, 4));
    desired.push_back(output(regs.back(), plant));
  }
  const MomentSet mom = estimate_moments(regs, desired, 2);
  const double res = normal_residual(plant, mom);
  report(6, "planted weights solve the empirical normal equations", res <= 1e-12,
         "residual " + fmt(res));
}

EnsembleResult g_case1_result;  // shared between criteria 7 and 8

void criterion_case1() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = case_config(2, 1e-3, kMuCaseI, 7000, 200);
  g_case1_result = emse_ensemble(cfg, false);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const double steady = g_case1_result.curve.steady_state_db();
  const std::vector<double> db = g_case1_result.curve.db();
  const double early_slope = slope_db(db, 0, 500);
  const double late_slope = slope_db(db, 500, 2000);
  const bool pass = steady < -35.0 && early_slope > late_slope && secs < 120.0;
  report(7, "order-2 identification reaches the noise-limited floor, slow start first",
         pass,
         "steady " + fmt(steady) + " dB, slopes " + fmt(early_slope) + " vs " +
             fmt(late_slope) + " dB/iter, " + fmt(secs) + " s");
}

void criterion_case2() {
  const ExperimentConfig cfg = case_config(2, 1e-6, kMuCaseII, 20000, 200);
  const EnsembleResult res = emse_ensemble(cfg, false);
  const double steady = res.curve.steady_state_db();
  const double steady_case1 = g_case1_result.curve.steady_state_db();
  const bool pass = steady < -60.0 && (steady_case1 - steady) >= 25.0;
  report(8, "1000x lower noise drops the floor below -60 dB (>= 25 dB gain)", pass,
         "steady " + fmt(steady) + " dB vs " + fmt(steady_case1) + " dB");
}

void criterion_case4() {
  ExperimentConfig cfg = case_config(3, 1e-3, kMuCaseIV, 20000, 200);
  cfg.plant_seed = kCaseIVPlantSeed;  // a different plant, as in the source cases
  const EnsembleResult res = emse_ensemble(cfg, false);
  const std::vector<double> db = res.curve.db();
  const double at_ten = db[9];
  const double steady = res.curve.steady_state_db();
  const bool pass = steady <= at_ten - 30.0;
  report(9, "order-3 identification drops >= 30 dB from its iteration-10 level", pass,
         "EMSE " + fmt(at_ten) + " dB at iter 10, steady " + fmt(steady) + " dB");
}

void criterion_baseline_comparison() {
  // instrumented per-iteration costs at M=10, K=2
  const Regressor zero_u(10, 0.0);
  SmlLms sml_probe(2, 10, kMuCompareSml);
  sml_probe.step(zero_u, 0.0);
  VolterraLms vol_probe(2, 10, kMuCompareVolterra);
  vol_probe.step(zero_u, 0.0);
  const long sml_mults = sml_probe.mult_count_last();
  const long vol_mults = vol_probe.mult_count_last();

  ExperimentConfig cfg = case_config(2, 1e-3, kMuCompareSml, 7000, 200);
  cfg.mu_sml = kMuCompareSml;
  cfg.mu_volterra = kMuCompareVolterra;
  const EnsembleResult sml_res = emse_ensemble(cfg, false);
  ExperimentConfig vcfg = cfg;
  vcfg.algorithm = Algorithm::kVolterraLms;
  const EnsembleResult vol_res = emse_ensemble(vcfg, false);

  const double sml_db = sml_res.curve.steady_state_db();
  const double vol_db = vol_res.curve.steady_state_db();
  const bool pass = sml_mults == 44 && vol_mults >= 132 && sml_mults < vol_mults &&
                    std::abs(sml_db - vol_db) <= 3.0;
  report(10, "44 vs >= 132 mult/iter at equalized steady-state floors", pass,
         std::to_string(sml_mults) + " vs " + std::to_string(vol_mults) + " mult/iter, " +
             fmt(sml_db) + " vs " + fmt(vol_db) + " dB");
}

void criterion_degree_property() {
  std::mt19937_64 rng(137035);
  bool ok = true;
  std::string detail;
  for (int k : {2, 3}) {
    const int m = 3;
    const MomentSet mom = oracle::moments_from_random_data(rng, k, m, 60);
    const FactorWeights w = oracle::random_weights(rng, k, m);
    const FactorWeights dir = oracle::random_weights(rng, k, m);
    const int degree = 2 * k;
    std::vector<double> xs, ys;
    auto at = [&](double t) {
      FactorWeights wt = w;
      for (int s = 0; s < k; ++s)
        for (int j = 0; j < m; ++j)
          wt.factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] +=
              t * dir.factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
      return mse(wt, mom);
    };
    for (int p = 0; p <= degree; ++p) {
      xs.push_back(0.3 * p);
      ys.push_back(at(0.3 * p));
    }
    const double probe = 0.3 * (degree + 1);
    const double predicted = oracle::lagrange_extrapolate(xs, ys, probe);
    const double actual = at(probe);
    const double rel = std::abs(predicted - actual) / std::max(std::abs(actual), 1e-12);
    ok = ok && rel < 1e-8;
    detail += (k == 2 ? "K=2 rel " : ", K=3 rel ") + fmt(rel);
  }
  report(11, "restricted to a line, the cost is a degree-2K polynomial", ok, detail);
}

}  // namespace

void guarded(int id, const std::string& name, void (*criterion)()) {
  try {
    criterion();
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what());
  }
}

int main() {
  std::printf("acceptance suite\n");
  guarded(1, "gradient vs finite differences", criterion_gradient_fd);
  guarded(2, "product form vs contraction", criterion_kron_equivalence);
  guarded(3, "update-law consistency", criterion_update_consistency);
  guarded(4, "multiplication census", criterion_mult_census);
  guarded(5, "zero fixed point", criterion_zero_fixed_point);
  guarded(6, "planted solution", criterion_planted_solution);
  guarded(7, "order-2 identification", criterion_case1);
  guarded(8, "low-noise identification", criterion_case2);
  guarded(9, "order-3 identification", criterion_case4);
  guarded(10, "baseline comparison", criterion_baseline_comparison);
  guarded(11, "degree-2K property", criterion_degree_property);
  std::printf("%d of 11 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
