#pragma once

#include <cstdint>
#include <string_view>

namespace chainshell {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream: the value depends only on (seed, stream, counter), so
/// results are independent of evaluation order and thread count.
constexpr std::uint64_t keyed_bits(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ stream) ^ (counter * 0xd1342543de82ef95ULL + 1));
}

/// Uniform double in [0, 1).
constexpr double keyed_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return static_cast<double>(keyed_bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a(std::string_view text,
                              std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

/// Child seed for a named stage ("gen3d/g4", "optimize", ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return mix64(seed ^ fnv1a(label));
}

}  // namespace chainshell
