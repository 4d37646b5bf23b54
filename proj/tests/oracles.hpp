#pragma once

// Test-side oracles. These stay independent of the library's fast paths:
// brute-force nested sums, central finite differences, and polynomial
// extrapolation, all written the slow direct way.

#include <random>
#include <vector>

#include "sml/mse_surface.hpp"

namespace oracle {

inline sml::Vec random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  sml::Vec v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

inline sml::FactorWeights random_weights(std::mt19937_64& rng, int order, int length) {
  sml::FactorWeights w;
  for (int s = 0; s < order; ++s)
    w.factors.push_back(random_vec(rng, static_cast<std::size_t>(length)));
  return w;
}

inline sml::MomentSet moments_from_random_data(std::mt19937_64& rng, int order,
                                               int length, int n_samples) {
  std::vector<sml::Regressor> regs;
  sml::Vec desired;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < n_samples; ++i) {
    regs.push_back(random_vec(rng, static_cast<std::size_t>(length)));
    desired.push_back(2.0 * normal(rng));
  }
  return sml::estimate_moments(regs, desired, order);
}

// Central finite differences of the mse surface, component by component.
inline std::vector<sml::Vec> fd_gradient(const sml::FactorWeights& w,
                                         const sml::MomentSet& mom, double step) {
  std::vector<sml::Vec> g;
  for (int s = 0; s < w.order(); ++s) {
    sml::Vec gs(static_cast<std::size_t>(w.length()), 0.0);
    for (int j = 0; j < w.length(); ++j) {
      sml::FactorWeights plus = w, minus = w;
      plus.factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] += step;
      minus.factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] -= step;
      gs[static_cast<std::size_t>(j)] =
          (sml::mse(plus, mom) - sml::mse(minus, mom)) / (2.0 * step);
    }
    g.push_back(std::move(gs));
  }
  return g;
}

// Literal nested sum of the degree-K homogeneous polynomial filter with a
// separable kernel: iterates every multi-index, no factoring.
inline double separable_volterra_output(const sml::Vec& u,
                                        const std::vector<sml::Vec>& kernel_factors) {
  const int k = static_cast<int>(kernel_factors.size());
  const int m = static_cast<int>(u.size());
  std::vector<int> mi(static_cast<std::size_t>(k), 0);
  double acc = 0.0;
  while (true) {
    double term = 1.0;
    for (int s = 0; s < k; ++s)
      term *= kernel_factors[static_cast<std::size_t>(s)][static_cast<std::size_t>(mi[static_cast<std::size_t>(s)])] *
              u[static_cast<std::size_t>(mi[static_cast<std::size_t>(s)])];
    acc += term;
    int t = k - 1;
    while (t >= 0 && mi[static_cast<std::size_t>(t)] == m - 1) --t;
    if (t < 0) break;
    ++mi[static_cast<std::size_t>(t)];
    for (int r = t + 1; r < k; ++r) mi[static_cast<std::size_t>(r)] = 0;
  }
  return acc;
}

// The degree-(n-1) interpolating polynomial through (xs, ys), evaluated at
// x (Lagrange form).
inline double lagrange_extrapolate(const std::vector<double>& xs,
                                   const std::vector<double>& ys, double x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double li = 1.0;
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (j != i) li *= (x - xs[j]) / (xs[i] - xs[j]);
    acc += ys[i] * li;
  }
  return acc;
}

inline double stacked_rel_error(const std::vector<sml::Vec>& got,
                                const std::vector<sml::Vec>& want) {
  double diff2 = 0.0, want2 = 0.0;
  for (std::size_t s = 0; s < got.size(); ++s)
    for (std::size_t j = 0; j < got[s].size(); ++j) {
      const double d = got[s][j] - want[s][j];
      diff2 += d * d;
      want2 += want[s][j] * want[s][j];
    }
  return std::sqrt(diff2) / std::max(std::sqrt(want2), 1e-12);
}

}  // namespace oracle
