#pragma once

#include <cstdint>
#include <random>

namespace fdrlab {

using Engine = std::mt19937_64;

/// Counter-based stream splitting: mixes a master seed with a stream index
/// (splitmix64 finalizer) so that stream i is independent of how many other
/// streams exist and of which thread consumes it.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline Engine make_engine(std::uint64_t seed, std::uint64_t stream) {
  return Engine(mix_seed(seed, stream));
}

}  // namespace fdrlab
