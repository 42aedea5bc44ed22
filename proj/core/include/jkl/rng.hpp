#pragma once

#include <cstdint>
#include <random>

namespace jkl {

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of trajectory `index` under `master`: splitmix64(master ^ splitmix64(index + golden)).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Seed of reaction channel `r` inside one trajectory (next-reaction clocks).
std::uint64_t channel_seed(std::uint64_t trajectory_seed, std::uint64_t r) noexcept;

/// mt19937_64 with a pinned uniform and exponential transform, so streams are
/// identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Unit-rate exponential, -log(1 - u).
  double exponential();

 private:
  std::mt19937_64 engine_;
};

}  // namespace jkl
