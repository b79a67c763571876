#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace quakemodes {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Stable per-test seed: mixes the global seed with a canonical key string, so
// any subset of tests reproduces identically regardless of execution order.
inline uint64_t derive_seed(uint64_t global_seed, const std::string& key) {
  return splitmix64(fnv1a64(key) ^ (global_seed * 0x9E3779B97F4A7C15ULL));
}

// Uniform integer in [0, n) without modulo bias (Lemire's method). mt19937_64
// output is fully specified by the standard, so together these draws are
// identical across platforms and standard libraries.
inline uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto lo = static_cast<uint64_t>(m);
  if (lo < n) {
    const uint64_t t = -n % n;
    while (lo < t) {
      x = rng();
      m = static_cast<__uint128_t>(x) * n;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<uint64_t>(m >> 64);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// In-place Fisher-Yates shuffle; preserves the multiset of elements.
template <typename T>
void fisher_yates(std::mt19937_64& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(rng, i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace quakemodes
