#pragma once

// Counter-based 64-bit mixing and a small deterministic stream generator.
// Everything here is specified bit-exactly so that independent
// implementations reproduce the same draws from the same seeds.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>

namespace wzexp {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// splitmix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Keyed hash over a word sequence: absorbs the word count first, then each
/// word, one mix per word. See docs/shared_randomness.md.
class KeyHasher {
 public:
  explicit constexpr KeyHasher(std::uint64_t seed) noexcept : state_(mix64(seed + kGolden)) {}

  constexpr KeyHasher& absorb(std::uint64_t word) noexcept {
    state_ = mix64((state_ ^ word) + kGolden);
    return *this;
  }
  constexpr std::uint64_t finish() const noexcept { return mix64(state_ + kGolden); }

 private:
  std::uint64_t state_;
};

inline std::uint64_t hash_words(std::uint64_t seed, std::span<const std::uint64_t> words) noexcept {
  KeyHasher h(seed);
  h.absorb(words.size());
  for (auto w : words) h.absorb(w);
  return h.finish();
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> words) noexcept {
  return hash_words(seed, std::span<const std::uint64_t>(words.begin(), words.size()));
}

/// Maps 64 random bits to a uniform double in (0, 1].
constexpr double bits_to_unit_open0(std::uint64_t bits) noexcept {
  return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

/// Sequential generator (splitmix64 stream).
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden;
    return mix64(state_);
  }
  /// Uniform in (0, 1].
  double uniform() noexcept { return bits_to_unit_open0(next()); }
  /// Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t r;
    do r = next(); while (r >= limit);
    return r % bound;
  }
  /// Standard normal by Box-Muller (one draw per call).
  double normal() noexcept {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace wzexp
