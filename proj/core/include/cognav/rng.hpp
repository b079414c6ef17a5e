#pragma once

#include <cstdint>
#include <random>

namespace cognav {

// Deterministic random source. All randomized algorithms in the library draw
// through this wrapper; the helpers below avoid std distribution objects,
// whose output is not pinned down across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). n must be positive. Rejection sampling keeps
  // the draw unbiased.
  std::size_t index(std::size_t n) {
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % span);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double real01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double real(double lo, double hi) { return lo + (hi - lo) * real01(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cognav
