#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace linklouvain {

using Rng = std::mt19937_64;

// splitmix64 finalizer. Used for counter-based draws that must not depend on
// iteration order (per-edge, per-day simulation decisions; neighbor sampling).
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ mix64(b));
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c) {
  return hash_combine(hash_combine(a, b), c);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c, std::uint64_t d) {
  return hash_combine(hash_combine(a, b, c), d);
}

// Uniform double in [0, 1) from a 64-bit hash.
constexpr double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Derives an independent stream seed for a named stage.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return hash_combine(seed, stream);
}

template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& rng) {
  std::shuffle(v.begin(), v.end(), rng);
}

}  // namespace linklouvain
