#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace permcorr {

// SplitMix64: tiny, fast, and fully specified, so every seeded result in
// this project is reproducible across platforms and standard libraries.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // unbiased integer in [0, bound) via rejection
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // standard normal via Box-Muller (one draw per call; the sine half is dropped)
  double gauss() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

// Decorrelated per-stream seed; streams derived from consecutive indices
// behave as independent generators regardless of worker layout.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mix(seed ^ (index * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull));
  return mix.next();
}

template <typename Index>
void fisher_yates(std::span<Index> values, SplitMix64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace permcorr
