#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "topoproj/types.hpp"

namespace topoproj {

/// Deterministic 64-bit generator (splitmix64). Every stochastic operation in
/// the library draws from this so results are reproducible bit-for-bit and do
/// not depend on standard-library distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  Scalar next_unit() { return static_cast<Scalar>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi); returns lo when the interval is empty.
  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * next_unit(); }

  // Uniform integer in [0, n). Rejection sampling, exact.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::uniform_index: n must be positive");
    const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
    std::uint64_t r = next_u64();
    while (r < reject_below) r = next_u64();
    return r % n;
  }

  // Box-Muller, caching the spare deviate.
  Scalar normal(Scalar mean = 0.0, Scalar stddev = 1.0) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    Scalar u1 = next_unit();
    while (u1 <= 0.0) u1 = next_unit();
    const Scalar u2 = next_unit();
    const Scalar radius = std::sqrt(-2.0 * std::log(u1));
    const Scalar angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return mean + stddev * radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  Scalar spare_ = 0.0;
};

inline std::uint64_t splitmix_once(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix_once(a ^ splitmix_once(b));
}

/// Seed for one stochastic operation, derived from the base seed, a stream
/// tag, and the indices that identify the operation (cell coordinates,
/// repeat index, unit index, ...). Pure function: reruns replay exactly.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view tag,
                                 std::initializer_list<std::uint64_t> parts = {}) {
  std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag
  for (const char c : tag) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ull;
  }
  std::uint64_t seed = mix_seed(base, h);
  for (const std::uint64_t p : parts) seed = mix_seed(seed, p);
  return seed;
}

/// First `count` entries of a seeded Fisher-Yates pass over 0..population-1.
inline std::vector<Index> sample_without_replacement(Index population, Index count, Rng& rng) {
  if (count < 0 || count > population)
    throw std::invalid_argument("sample_without_replacement: count out of range");
  std::vector<Index> ids(static_cast<std::size_t>(population));
  std::iota(ids.begin(), ids.end(), Index{0});
  for (Index i = 0; i < count; ++i) {
    const Index j = i + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(population - i)));
    std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
  }
  ids.resize(static_cast<std::size_t>(count));
  return ids;
}

inline void shuffle(std::vector<Index>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace topoproj
