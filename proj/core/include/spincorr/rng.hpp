#pragma once

#include <cmath>
#include <cstdint>

namespace spincorr {

/// 64-bit finalizer from SplitMix64 (Steele, Lea & Vigna). Also used to derive
/// per-substream base states.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based SplitMix64 stream.
///
/// A stream is a pure function of (seed, substream); event generators derive one
/// substream per event sequence number, so generation can be partitioned across
/// any number of workers without changing a single drawn value. All derived
/// distributions (uniform, bounded integer, normal) are implemented here rather
/// than taken from <random> so the produced values are pinned by this library,
/// not by the standard-library vendor.
class RngStream {
public:
  RngStream(std::uint64_t seed, std::uint64_t substream) noexcept
      : state_(mix64(seed ^ mix64(substream + kGamma))) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform in [0, 1).
  double next_double() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1]; safe as a log() argument.
  double next_double_open() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, n); requires n >= 1.
  std::uint64_t next_below(std::uint64_t n) noexcept {
    const std::uint64_t cutoff = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= cutoff) return r % n;
    }
  }

  /// Standard normal via Box-Muller (one variate per call, two uniforms).
  double next_normal() noexcept {
    const double u1 = next_double_open();
    const double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }

private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr double kPi = 3.141592653589793238462643383279502884;

  std::uint64_t state_;
};

}  // namespace spincorr
