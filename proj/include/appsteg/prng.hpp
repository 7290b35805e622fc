#pragma once

#include <cstdint>
#include <span>

namespace appsteg {

/// xorshift64* generator. The step is
///
///   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; return x * 0x2545F4914F6CDD1D;
///
/// and the state must never be zero. Streams are identical on every platform,
/// which keeps embedding paths and keystreams reproducible.
class Prng {
 public:
  static constexpr std::uint64_t kMultiplier = 0x2545F4914F6CDD1DULL;
  /// Substituted for a zero seed.
  static constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

  explicit Prng(std::uint64_t seed) : state_(seed == 0 ? kZeroSeedReplacement : seed) {}

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * kMultiplier;
  }

  /// Keystream byte: the top 8 bits of one step.
  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next() >> 56); }

  /// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t uniform(std::uint64_t bound);

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Standard normal deviate (Box-Muller, one value per call).
  double normal();

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

/// FNV-1a, 64-bit.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

/// Seeded from FNV-1a of the password. Throws std::invalid_argument when empty.
Prng prng_from_password(std::span<const std::uint8_t> password);

/// splitmix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace appsteg
