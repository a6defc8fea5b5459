#include "mixlab/rng.hpp"

namespace mixlab {

Rng::Rng(std::uint64_t seed, std::uint64_t replica) noexcept
    : key_(mix64(mix64(seed ^ 0x6a09e667f3bcc909ULL) + mix64(replica + 0x3c6ef372fe94f82bULL))),
      salt_(mix64(key_ ^ 0xa54ff53a5f1d36f1ULL)) {}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                          std::uint64_t b) noexcept {
  return mix64(mix64(seed + 0x510e527fade682d1ULL) ^ mix64(a * 0x9b05688c2b3e6c1fULL + b));
}

}  // namespace mixlab
