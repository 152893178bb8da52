#pragma once

#include "topola/net_core.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace topola {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for one component of a run: every consumer of the
/// user seed derives its own generator from (seed, tag, counter).
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag, std::uint64_t counter = 0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : tag) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001b3ULL;
  return mix64(mix64(seed ^ h) + counter);
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

}  // namespace topola
