#include "spusim/rng.hpp"

#include <stdexcept>

namespace spusim {

Lfsr19::Lfsr19(std::uint32_t state) : state_(state & kMask) {
  if (state_ == 0)
    throw std::invalid_argument("LFSR state must be nonzero");
}

Lfsr19 Lfsr19::from_seed(std::uint64_t seed) {
  std::uint32_t s = std::uint32_t(splitmix64(seed ^ 0x5350554C46535231ULL)) & kMask;
  return Lfsr19(s == 0 ? 1u : s);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

} // namespace spusim
