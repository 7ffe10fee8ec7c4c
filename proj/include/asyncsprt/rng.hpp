#pragma once

#include <cmath>
#include <cstdint>

namespace asyncsprt {

// Minimal PCG32 generator (O'Neill's pcg32 variant). A (seed, stream) pair
// selects an independent sequence, so concurrent workers can draw from
// disjoint, reproducible streams without coordination. Trial i of a Monte
// Carlo run uses stream i of the run seed.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(0), inc_((stream << 1u) | 1u) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  // uniform in [0, 1) with 53-bit resolution
  double next_double() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
  }

  // uniform integer in [0, bound), rejection sampled to avoid modulo bias
  std::uint32_t next_below(std::uint32_t bound) {
    const std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      const std::uint32_t r = next_u32();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// Standard normal draws via Box-Muller on top of Pcg32, with the usual
// cached spare. Platform-independent, unlike std::normal_distribution.
class GaussianSampler {
 public:
  explicit GaussianSampler(Pcg32 rng) : rng_(rng) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = rng_.next_double();
    while (u1 <= 0.0) u1 = rng_.next_double();
    const double u2 = rng_.next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    spare_ = radius * std::sin(kTwoPi * u2);
    has_spare_ = true;
    return radius * std::cos(kTwoPi * u2);
  }

  Pcg32& engine() { return rng_; }

 private:
  Pcg32 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Identifier recorded in Monte Carlo output metadata.
inline constexpr const char* kRngAlgorithm = "pcg32(seed,stream=trial)+box-muller";

// splitmix64 finalizer; used to derive independent sub-seeds
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace asyncsprt
