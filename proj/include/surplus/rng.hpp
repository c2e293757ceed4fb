#pragma once

#include <cstdint>

namespace surplus {

/// SplitMix64 generator. All randomness in this project flows through this
/// one algorithm so that runs can be replayed bit-exactly from a recorded
/// seed, in this implementation or a reimplementation.
///
/// State transition and output (Steele, Lea & Flood's constants):
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   output = z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53-bit resolution.
  double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) noexcept { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, bound). Uses rejection-free modulo; bias is
  /// negligible for the small bounds used here and keeps replay trivial.
  std::uint64_t next_below(std::uint64_t bound) noexcept { return next_u64() % bound; }

  /// Seed of the independent stream derived from (seed, stream):
  ///   first output of SplitMix64(seed), plus stream * 0x9E3779B97F4A7C15.
  /// Recording this value is enough to replay the stream.
  static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    SplitMix64 base(seed);
    return base.next_u64() + stream * 0x9E3779B97F4A7C15ULL;
  }

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return SplitMix64(substream_seed(seed, stream));
  }

 private:
  std::uint64_t state_;
};

}  // namespace surplus
