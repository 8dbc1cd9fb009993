// Self-contained deterministic RNG. The standard distributions are
// implementation-defined, which would make checkpoints and synthetic datasets
// differ across toolchains; everything random in this project goes through
// SplitMix64 so identical seeds give identical bytes everywhere.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace kermit {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
      const std::uint64_t v = next();
      if (v < bound) return v % n;
    }
  }

  // Standard normal via Box-Muller; the paired draw is cached.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

  // Fisher-Yates; fully specified, unlike std::shuffle.
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Deterministic seed derivation for (seed, salt) pairs, e.g. per-epoch
// shuffles. One SplitMix64 scramble keeps nearby salts uncorrelated.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  SplitMix64 mix(seed ^ (salt * 0xda942042e4dd58b5ULL + 0x2545f4914f6cdd1dULL));
  return mix.next();
}

}  // namespace kermit
