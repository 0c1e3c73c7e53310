#pragma once

#include <cstdint>
#include <random>

namespace sigsde {

using Engine = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the independent substream identified by (seed, a, b). Used as
/// (seed, trial, trajectory) so results do not depend on scheduling.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd1342543de82ef95ULL));
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Engine(stream_seed(seed, a, b));
}

}  // namespace sigsde
