#pragma once

#include <cstdint>

namespace rwrc {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// Seed for an independent substream: (master, tag, index) -> 64 bits.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return mix64(mix64(master ^ mix64(tag + 0x9e3779b97f4a7c15ULL)) + index);
}

}  // namespace rwrc
