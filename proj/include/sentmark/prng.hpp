#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>
#include <vector>

namespace sentmark {

// Deterministic PRNG used everywhere randomness must match bit-exactly
// between generation and detection (and across language ports).
//
// splitmix64: state += 0x9E3779B97F4A7C15, output = finalizer(state) with
// the 30/27/31 shift constants. Seed 0 produces 0xE220A8397B1DCDAF,
// 0x6E789E6AA1B965F4, 0x06C45D188009454F, ... (the published test vector).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1), 53 mantissa bits.
  double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  // Uniform index in [0, n). Modulo of a 64-bit draw; bias is < 2^-40 for
  // every n used here (n <= 2^24).
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// One splitmix64 step from state x. Used to turn structured integers
// (signature * prime, token ids, byte hashes) into well-mixed seeds.
inline std::uint64_t mix64(std::uint64_t x) { return SplitMix64(x).next(); }

// Two finalizer passes. Mask/greenlist seeds are derived this way: one pass
// over the raw products {0*p, 1*p, ...} left a signature with no valid-set
// membership at the default prime, which the second pass removes.
inline std::uint64_t mask_seed(std::uint64_t x) { return mix64(mix64(x)); }

// Order-independent-free chained byte hash (not cryptographic); stable
// across platforms, used for config digests and per-document seeds.
inline std::uint64_t hash_bytes(std::string_view bytes) {
  std::uint64_t h = 0x5EA7B0CFB41E64C1ULL;
  for (unsigned char c : bytes) {
    h = mix64(h ^ c);
  }
  return h;
}

// Standard normals via Box-Muller over a SplitMix64 stream.
//   u1 = ((next() >> 11) + 1) * 2^-53   in (0, 1]
//   u2 = (next() >> 11) * 2^-53         in [0, 1)
//   z0 = sqrt(-2 ln u1) cos(2 pi u2),  z1 = ... sin(...)
// Values are emitted z0, z1, z0, z1, ... so consumers of an odd count stay
// reproducible.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 =
        static_cast<double>((rng_.next() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_.next() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
  }

 private:
  SplitMix64 rng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// In-place Fisher-Yates: for i = n-1 .. 1, j = rng.next() % (i+1), swap.
template <typename T>
void fisher_yates(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
    std::swap(items[i], items[j]);
  }
}

// 0, 1, ..., n-1 shuffled under the given seed.
inline std::vector<std::uint32_t> shuffled_indices(std::uint32_t n,
                                                   std::uint64_t seed) {
  std::vector<std::uint32_t> ids(n);
  for (std::uint32_t i = 0; i < n; ++i) ids[i] = i;
  SplitMix64 rng(seed);
  fisher_yates(ids, rng);
  return ids;
}

// floor(x + 0.5); the rounding rule shared by region and greenlist sizing.
inline int round_half_up(double x) {
  return static_cast<int>(std::floor(x + 0.5));
}

}  // namespace sentmark
