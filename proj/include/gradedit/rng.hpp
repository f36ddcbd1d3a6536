#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gradedit {

// Deterministic RNG helpers. std::mt19937_64 itself is portable, but the
// standard distributions are not, so uniform draws are built directly from
// raw engine output to keep seeded runs byte-identical everywhere.

using Rng = std::mt19937_64;

// Uniform double in [0, 1).
inline double rng_uniform(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double rng_uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rng_uniform(rng);
}

// Uniform index in [0, n).
inline std::size_t rng_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// Fisher-Yates shuffle with explicit index draws.
template <typename T>
void rng_shuffle(Rng& rng, std::vector<T>& items) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng_index(rng, i)]);
  }
}

}  // namespace gradedit
