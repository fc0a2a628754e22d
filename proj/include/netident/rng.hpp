#pragma once

#include <cstdint>
#include <initializer_list>

namespace netident::rng {

// Counter-based streams: every random number is a pure function of a key
// tuple, so results do not depend on evaluation order or thread count.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

/// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t k) noexcept {
  return static_cast<double>(splitmix64(k) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two sub-streams of `k`.
double standard_normal(std::uint64_t k) noexcept;

}  // namespace netident::rng
