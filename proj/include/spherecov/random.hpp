#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace spherecov {

/// Portable seeded streams.
///
/// Every randomized routine draws from `rng_stream(seed, purpose, index)`:
/// a std::mt19937_64 seeded with
///
///   splitmix64(splitmix64(seed ^ purpose) + index)
///
/// where `purpose` is one of the `stream` tags below and `index` is the
/// realization (or trial) number. Standard normals come from the Box-Muller
/// transform on 53-bit uniforms u = (word >> 11) * 2^-53, consuming two words
/// per pair and returning the cosine branch first. Every piece is fully
/// specified, so the streams can be regenerated bit-for-bit elsewhere.
namespace stream {
inline constexpr std::uint64_t points = 0x706f696e7473ULL;      // "points"
inline constexpr std::uint64_t times = 0x74696d6573ULL;         // "times"
inline constexpr std::uint64_t gram_trials = 0x6772616dULL;     // "gram"
inline constexpr std::uint64_t factorized = 0x666163746fULL;    // "facto"
inline constexpr std::uint64_t spectral = 0x7370656374ULL;      // "spect"
inline constexpr std::uint64_t generic = 0x67656eULL;           // "gen"
}  // namespace stream

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Rng {
public:
  explicit Rng(std::uint64_t state_seed) : engine_(state_seed) {}

  std::uint64_t next_word() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
  }

private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Rng rng_stream(std::uint64_t seed, std::uint64_t purpose,
                      std::uint64_t index = 0) {
  return Rng(splitmix64(splitmix64(seed ^ purpose) + index));
}

}  // namespace spherecov
