#pragma once

#include <cstdint>
#include <random>

#include "sml/tensor_kron.hpp"

namespace sml {

// splitmix64; used to derive independent seed streams from a base seed.
inline std::uint64_t split_mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return split_mix64(base + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

inline Vec gaussian_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec out(n);
  for (double& v : out) v = normal(rng);
  return out;
}

}  // namespace sml
