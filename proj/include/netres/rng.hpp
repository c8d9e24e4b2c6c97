#pragma once

// Seeded randomness for the whole pipeline. Every stochastic operation takes
// an explicit 64-bit seed; sub-seeds are derived with derive_seed() so that
// independent parts of an experiment draw from independent streams.
//
// Seed derivation is fixed bit-exactly (see README, "Seed derivation"):
//   derive_seed(master, purpose, index)
//     = splitmix64(splitmix64(master ^ fnv1a64(purpose)) ^ index)
// where splitmix64 is the standard SplitMix64 finalizer and fnv1a64 the
// 64-bit FNV-1a hash of the ASCII purpose tag.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace netres {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view purpose,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(master ^ fnv1a64(purpose)) ^ index);
}

// mt19937_64 with explicit, portable draw methods. std::*_distribution is
// implementation-defined, so uniform and normal draws are spelled out here;
// outputs are identical across standard libraries for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be > 0. Values below 2^64 mod n are
  // rejected so the result is exactly uniform.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t min = (0 - n) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x < min);
    return x % n;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller (cosine branch); consumes exactly two engine draws.
  double normal(double mean, double stddev) {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double z = r * std::cos(2.0 * 3.14159265358979323846 * u2);
    return mean + stddev * z;
  }

  // k distinct indices from [0, n), uniform without replacement, via partial
  // Fisher-Yates. Order of the returned sample is the draw order.
  std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace netres
