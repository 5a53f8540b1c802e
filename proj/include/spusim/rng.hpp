#pragma once

#include <cstdint>
#include <random>

namespace spusim {

/// 19-bit Fibonacci LFSR, polynomial x^19 + x^18 + x^17 + x^14 + 1.
/// The state is never zero; the sequence has period 2^19 - 1.
class Lfsr19 {
public:
  static constexpr std::uint32_t kMask = (1u << 19) - 1;
  static constexpr std::uint32_t kPeriod = kMask;

  /// Throws std::invalid_argument on a zero (mod 2^19) seed.
  explicit Lfsr19(std::uint32_t state);

  /// Nonzero 19-bit state derived from an arbitrary 64-bit run seed.
  static Lfsr19 from_seed(std::uint64_t seed);

  std::uint32_t state() const { return state_; }

  /// Advance one step and return the low 12 bits of the new state.
  std::uint32_t next() {
    const std::uint32_t bit = ((state_ >> 18) ^ (state_ >> 17) ^ (state_ >> 16) ^ (state_ >> 13)) & 1u;
    state_ = ((state_ << 1) | bit) & kMask;
    return state_ & 0xFFFu;
  }

private:
  std::uint32_t state_;
};

/// Reference uniform source: std::mt19937_64 (MT19937-64), reals in [0, 1) from the top 53 bits.
class UniformSource {
public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  double next() { return double(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by scaling a uniform real.
  int below(int n) {
    const int k = int(next() * n);
    return k < n ? k : n - 1;
  }

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

} // namespace spusim
