#include "sml/verify.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "sml/adaptive.hpp"
#include "sml/rng.hpp"
#include "sml/simkit.hpp"

namespace sml {

namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << std::scientific << v;
  return ss.str();
}

Vec random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

FactorWeights random_weights(std::mt19937_64& rng, int order, int length) {
  FactorWeights w;
  for (int s = 0; s < order; ++s)
    w.factors.push_back(random_vec(rng, static_cast<std::size_t>(length)));
  return w;
}

MomentSet random_moments(std::mt19937_64& rng, int order, int length, int n_samples) {
  std::vector<Regressor> regs;
  Vec desired;
  for (int i = 0; i < n_samples; ++i) {
    regs.push_back(random_vec(rng, static_cast<std::size_t>(length)));
    desired.push_back(random_vec(rng, 1)[0] * 2.0);
  }
  return estimate_moments(regs, desired, order);
}

std::vector<Vec> fd_gradient(const FactorWeights& w, const MomentSet& mom, double step) {
  std::vector<Vec> g;
  for (int s = 0; s < w.order(); ++s) {
    Vec gs(static_cast<std::size_t>(w.length()), 0.0);
    for (int j = 0; j < w.length(); ++j) {
      FactorWeights plus = w, minus = w;
      plus.factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] += step;
      minus.factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] -= step;
      gs[static_cast<std::size_t>(j)] = (mse(plus, mom) - mse(minus, mom)) / (2.0 * step);
    }
    g.push_back(std::move(gs));
  }
  return g;
}

double stacked_norm(const std::vector<Vec>& g) {
  double acc = 0.0;
  for (const Vec& gs : g)
    for (double v : gs) acc += v * v;
  return std::sqrt(acc);
}

double stacked_diff_norm(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  double acc = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t j = 0; j < a[s].size(); ++j) {
      const double d = a[s][j] - b[s][j];
      acc += d * d;
    }
  return std::sqrt(acc);
}

CheckResult check_kron_identities() {
  std::mt19937_64 rng(101);
  double worst = 0.0;

  // mixed-product identity on random conforming vectors
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> dim(1, 6);
    const std::size_t na = static_cast<std::size_t>(dim(rng));
    const std::size_t nb = static_cast<std::size_t>(dim(rng));
    const Vec a = random_vec(rng, na), c = random_vec(rng, na);
    const Vec b = random_vec(rng, nb), d = random_vec(rng, nb);
    const double lhs = contract(kron(a, b), kron(c, d));
    const double rhs = contract(a, c) * contract(b, d);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
  }

  // entry formula through flat_index, exhaustively at small sizes
  for (int m = 1; m <= 4 && worst <= 1e-12; ++m) {
    for (int k = 1; k <= 3; ++k) {
      const Vec u = random_vec(rng, static_cast<std::size_t>(m));
      const Vec uk = kron_power(u, k);
      MultiIndex mi(static_cast<std::size_t>(k), 0);
      while (true) {
        double prod = 1.0;
        for (int idx : mi) prod *= u[static_cast<std::size_t>(idx)];
        worst = std::max(worst, std::abs(uk[flat_index(mi, m)] - prod));
        int t = k - 1;
        while (t >= 0 && mi[static_cast<std::size_t>(t)] == m - 1) --t;
        if (t < 0) break;
        ++mi[static_cast<std::size_t>(t)];
        for (int r = t + 1; r < k; ++r) mi[static_cast<std::size_t>(r)] = 0;
      }
    }
  }

  // reinserting the removed factor reproduces the simple tensor
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<int> mdist(1, 4), kdist(1, 3);
    const int m = mdist(rng), k = kdist(rng);
    const FactorWeights w = random_weights(rng, k, m);
    const Vec st = simple_tensor(w.factors);
    std::uniform_int_distribution<int> sdist(0, k - 1);
    const int s = sdist(rng);
    const Matrix open = partial_simple_tensor(w.factors, s);
    for (std::size_t p = 0; p < st.size(); ++p) {
      double acc = 0.0;
      for (std::size_t c = 0; c < open.cols(); ++c)
        acc += open(p, c) * w.factors[static_cast<std::size_t>(s)][c];
      worst = std::max(worst, std::abs(acc - st[p]) / std::max(1.0, std::abs(st[p])));
    }
  }

  const bool pass = worst < 1e-12;
  return {"kronecker-identities", pass, "max rel err " + fmt(worst)};
}

CheckResult check_product_form() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<int> mdist(1, 5), kdist(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int m = mdist(rng), k = kdist(rng);
    const FactorWeights w = random_weights(rng, k, m);
    const Regressor u = random_vec(rng, static_cast<std::size_t>(m));
    const double fast = output(u, w);
    const double dense = contract(kron_power(u, k), simple_tensor(w.factors));
    worst = std::max(worst, std::abs(fast - dense));
  }
  const bool pass = worst < 1e-10;
  return {"product-form-equivalence", pass, "max abs err " + fmt(worst)};
}

CheckResult check_gradient_fd(int draws, bool mutate_sign) {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> mdist(1, 4), kdist(1, 3);
  double worst = 0.0;
  for (int trial = 0; trial < draws; ++trial) {
    const int m = mdist(rng), k = kdist(rng);
    const MomentSet mom = random_moments(rng, k, m, 30);
    const FactorWeights w = random_weights(rng, k, m);
    std::vector<Vec> closed = grad(w, mom);
    if (mutate_sign)
      for (Vec& gs : closed)
        for (double& v : gs) v = -v;
    const std::vector<Vec> fd = fd_gradient(w, mom, 1e-6);
    const double rel = stacked_diff_norm(closed, fd) / std::max(stacked_norm(fd), 1e-12);
    worst = std::max(worst, rel);
  }
  const bool pass = worst < 1e-5;
  return {"gradient-finite-difference", pass,
          "max rel err " + fmt(worst) + " over " + std::to_string(draws) + " draws"};
}

CheckResult check_planted_solution() {
  const int m = 4, k = 2, n = 2000;
  std::mt19937_64 rng(404);
  const FactorWeights plant = random_weights(rng, k, m);
  std::vector<Regressor> regs;
  Vec desired;
  for (int i = 0; i < n; ++i) {
    regs.push_back(random_vec(rng, m));
    desired.push_back(output(regs.back(), plant));
  }
  const MomentSet mom = estimate_moments(regs, desired, k);
  const double res = normal_residual(plant, mom);
  const bool pass = res <= 1e-12;
  return {"planted-solution-residual", pass, "residual " + fmt(res)};
}

CheckResult check_update_consistency(int draws) {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> mdist(2, 4), kdist(1, 3);
  std::uniform_real_distribution<double> mudist(1e-3, 0.5);
  int failures = 0;
  for (int trial = 0; trial < draws; ++trial) {
    const int m = mdist(rng), k = kdist(rng);
    SmlLms filter(k, m, mudist(rng));
    filter.set_weights(random_weights(rng, k, m));
    const Regressor u = random_vec(rng, static_cast<std::size_t>(m));
    const double d = random_vec(rng, 1)[0];
    if (!sml_step_matches_gradient(filter, u, d)) ++failures;
  }
  return {"update-law-consistency", failures == 0,
          std::to_string(failures) + " of " + std::to_string(draws) + " states failed"};
}

CheckResult check_mult_census() {
  std::mt19937_64 rng(606);
  for (int m = 2; m <= 10; ++m) {
    for (int k = 2; k <= 4; ++k) {
      SmlLms filter(k, m, 1e-3);
      for (int i = 0; i < 3; ++i) {
        filter.step(random_vec(rng, static_cast<std::size_t>(m)), random_vec(rng, 1)[0]);
        if (filter.mult_count_last() != sml_mult_census(m, k))
          return {"multiplication-census", false,
                  "mismatch at M=" + std::to_string(m) + " K=" + std::to_string(k)};
      }
    }
  }
  return {"multiplication-census", true, "exact for M=2..10, K=2..4"};
}

CheckResult check_zero_fixed_point() {
  std::mt19937_64 rng(707);
  const int m = 5, k = 2;
  SmlLms filter(k, m, 0.1);
  filter.set_weights(zero_weights(k, m));
  for (int i = 0; i < 100; ++i)
    filter.step(random_vec(rng, m), random_vec(rng, 1)[0]);
  for (const Vec& f : filter.weights().factors)
    for (double v : f)
      if (v != 0.0) return {"zero-fixed-point", false, "weights moved off zero"};
  return {"zero-fixed-point", true, "weights identically zero after 100 steps"};
}

CheckResult check_k1_reduction() {
  std::mt19937_64 rng(808);
  const int m = 6;
  const double mu = 0.05;
  SmlLms sml_filter(1, m, mu);
  VolterraLms lms_filter(1, m, mu);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const Regressor u = random_vec(rng, m);
    const double d = random_vec(rng, 1)[0];
    sml_filter.step(u, d);
    lms_filter.step(u, d);
    for (int j = 0; j < m; ++j)
      worst = std::max(worst, std::abs(sml_filter.weights().factors[0][static_cast<std::size_t>(j)] -
                                       lms_filter.coefficients()[static_cast<std::size_t>(j)]));
  }
  const bool pass = worst <= 1e-14;
  return {"order-1-classical-lms-reduction", pass, "max weight gap " + fmt(worst)};
}

CheckResult check_moment_lln() {
  const int m = 4, n = 100000;
  const Vec signal = gen_input(n, 424242);
  std::vector<Regressor> regs;
  Vec desired;
  regs.reserve(n);
  for (int i = 0; i < n; ++i) {
    regs.push_back(regressor_at(signal, static_cast<std::size_t>(i), m));
    desired.push_back(0.0);
  }
  const MomentSet mom = estimate_moments(regs, desired, 1);
  double worst = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      worst = std::max(worst, std::abs(mom.r_uk(static_cast<std::size_t>(p),
                                                static_cast<std::size_t>(q)) -
                                       (p == q ? 1.0 : 0.0)));
  const bool pass = worst < 5e-2;
  return {"moment-estimate-lln", pass, "max entry err " + fmt(worst) + " at n=1e5"};
}

CheckResult check_residual_trend() {
  const int m = 4, k = 2;
  std::mt19937_64 rng(909);
  FactorWeights plant = random_weights(rng, k, m);
  double res[3] = {0, 0, 0};
  const int sizes[3] = {1000, 10000, 100000};
  for (int t = 0; t < 3; ++t) {
    std::vector<Regressor> regs;
    Vec desired;
    std::mt19937_64 data_rng(1000 + static_cast<std::uint64_t>(t));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < sizes[t]; ++i) {
      Vec u(m);
      for (double& v : u) v = normal(data_rng);
      regs.push_back(u);
      desired.push_back(output(u, plant) + 0.1 * normal(data_rng));
    }
    res[t] = normal_residual(plant, estimate_moments(regs, desired, k));
  }
  const bool pass = res[1] < res[0] && res[2] < res[1] && res[0] / res[2] > 3.0;
  return {"residual-noise-trend", pass,
          "residuals " + fmt(res[0]) + " / " + fmt(res[1]) + " / " + fmt(res[2])};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  std::vector<CheckResult> results;
  results.push_back(check_kron_identities());
  results.push_back(check_product_form());
  results.push_back(check_gradient_fd(opts.full ? 200 : 60, opts.mutate_grad_sign));
  results.push_back(check_planted_solution());
  results.push_back(check_update_consistency(opts.full ? 100 : 30));
  results.push_back(check_mult_census());
  results.push_back(check_zero_fixed_point());
  results.push_back(check_k1_reduction());
  if (opts.full) {
    results.push_back(check_moment_lln());
    results.push_back(check_residual_trend());
  }
  return results;
}

}  // namespace sml
