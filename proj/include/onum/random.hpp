#pragma once

// Seed plumbing. Every random concern draws from its own named stream
// derived from one master seed, so changing how one concern consumes
// randomness never perturbs another.

#include <cstdint>
#include <random>
#include <string_view>

namespace onum {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t stream_seed(std::uint64_t master, std::string_view name,
                                 std::uint64_t index = 0) noexcept {
  return splitmix64(splitmix64(master ^ fnv1a(name)) + splitmix64(index));
}

inline Rng make_stream(std::uint64_t master, std::string_view name, std::uint64_t index = 0) {
  return Rng(stream_seed(master, name, index));
}

/// Uniform double in [0, 1) from the top 53 bits; identical across
/// standard library implementations, unlike uniform_real_distribution.
inline double uniform01(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace onum
