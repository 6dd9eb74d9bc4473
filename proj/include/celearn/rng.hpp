#pragma once

#include <cstdint>

namespace celearn {

// Golden-ratio increment of the splitmix64 generator.
inline constexpr std::uint64_t kRngGamma = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer: bijective 64-bit mix with good avalanche.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Draw k of the counter-based stream identified by key. Pure function of
// (key, k), so streams can be consumed in any order or concurrently.
inline std::uint64_t stream_u64(std::uint64_t key, std::uint64_t k) {
  return mix64(key + (k + 1) * kRngGamma);
}

// Uniform draw in [0, 1) with 53 random bits.
inline double stream_u01(std::uint64_t key, std::uint64_t k) {
  return static_cast<double>(stream_u64(key, k) >> 11) * 0x1.0p-53;
}

// Stream key for the sample sequence of one (buyer, bundle) cell.
inline std::uint64_t pair_stream_key(std::uint64_t seed, int buyer,
                                     std::uint64_t bundle) {
  std::uint64_t h = mix64(seed + kRngGamma);
  h = mix64(h ^ (static_cast<std::uint64_t>(buyer) + kRngGamma));
  return mix64(h ^ (bundle + kRngGamma));
}

// Sub-seed derivation for independent deterministic streams (one per
// experiment task, generator call, etc.).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  return mix64(mix64(seed + kRngGamma) ^ (tag + kRngGamma));
}

// Sequential splitmix64 generator for value-model sampling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kRngGamma;
    return mix64(state_);
  }

  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Uniform over {0, ..., n - 1}.
  int uniform_int(int n) {
    int k = static_cast<int>(u01() * n);
    return k < n ? k : n - 1;
  }

  bool coin() { return (next() & 1u) != 0; }

 private:
  std::uint64_t state_;
};

}  // namespace celearn
