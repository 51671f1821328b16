#include "bntune/rng.hpp"

namespace bntune {

Seed derive_seed(Seed base, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(base ^ 0x6a09e667f3bcc909ULL);
  for (std::uint64_t id : path) h = mix64(h ^ mix64(id + 0x3c6ef372fe94f82bULL));
  return h;
}

std::size_t Rng::uniform_index(std::size_t n) noexcept {
  const auto bound = static_cast<std::uint64_t>(n);
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

}  // namespace bntune
