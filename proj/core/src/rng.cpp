#include "jkl/rng.hpp"

#include <cmath>

namespace jkl {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master ^ splitmix64(index + 0x9E3779B97F4A7C15ULL));
}

std::uint64_t channel_seed(std::uint64_t trajectory_seed, std::uint64_t r) noexcept {
  return splitmix64(trajectory_seed ^ splitmix64(~r));
}

double RandomStream::exponential() { return -std::log1p(-uniform()); }

}  // namespace jkl
