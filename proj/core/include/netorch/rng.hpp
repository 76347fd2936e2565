#pragma once

#include <cstdint>
#include <string_view>

namespace netorch {

// 64-bit FNV-1a. Used for hashing tokens into embedding buckets and for
// request digests in the gateway replay transport. Chosen over std::hash
// because the result must be identical across platforms and standard
// library implementations.
constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
constexpr uint64_t kFnvPrime = 0x100000001b3ull;

constexpr uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = kFnvOffsetBasis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// SplitMix64: tiny, fast, and fully specified by three constants, so every
// platform reproduces the same stream bit for bit. All randomness in the
// project flows through this generator; std::mt19937 etc. are deliberately
// avoided because their distributions are not portable.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform double in (0, 1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform(); }

 private:
  uint64_t state_;
};

// Derives an independent substream from (seed, purpose, index). Entities
// are keyed by a purpose tag ("ue_pos", "shadowing", ...) plus an entity
// index, so adding draws for one entity never shifts another entity's
// stream -- scenario generation stays stable when the sampling order
// changes.
inline SplitMix64 substream(uint64_t seed, std::string_view purpose, uint64_t index) {
  auto mix = [](uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  uint64_t s = mix(seed ^ fnv1a64(purpose));
  s = mix(s ^ index);
  return SplitMix64(s);
}

}  // namespace netorch
