#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dro {

// Mixes a base seed with a stream id into an independent 64-bit seed
// (splitmix64 finalizer). Used to derive per-component streams from one
// run seed so that adding a consumer does not shift the others.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Seeded generator with self-contained draw algorithms. The engine
// (mt19937_64) is fully specified by the standard; the standard library
// distributions are not, so index/real/normal draws are implemented here
// to keep streams identical across platforms and library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Unbiased uniform index in [0, n) by rejection.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t threshold = (0 - un) % un;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return static_cast<std::size_t>(r % un);
    }
  }

  // Standard normal via Box-Muller. Always consumes exactly two uniforms.
  double normal() {
    double u1 = uniform();
    const double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dro
