#pragma once

#include <cstdint>
#include <string_view>

namespace autoblock {

/// MurmurHash64A (Austin Appleby), little-endian block reads.
std::uint64_t murmur64(std::string_view data, std::uint64_t seed);

/// SplitMix64 finalizer; used to derive per-row and per-table seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t kDefaultHashSeed = 0x5eed0ab1c0ffee11ULL;

}  // namespace autoblock
