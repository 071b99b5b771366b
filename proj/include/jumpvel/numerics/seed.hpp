#pragma once

#include <cstdint>

namespace jumpvel {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream seed for (seed, a, b, tag).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t tag) {
  return splitmix64(splitmix64(splitmix64(seed ^ splitmix64(tag)) ^ a) ^ (b * 0x100000001b3ULL));
}

}  // namespace jumpvel
