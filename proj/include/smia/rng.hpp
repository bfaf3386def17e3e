#ifndef SMIA_RNG_HPP_
#define SMIA_RNG_HPP_

#include <cstdint>
#include <random>

namespace smia {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the independent substream `index` under `master`. Depends only
/// on the pair, never on how many other substreams were created.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0xD1B54A32D192ED03ULL));
}

using RngStream = std::mt19937_64;

inline RngStream make_stream(std::uint64_t master, std::uint64_t index) {
  return RngStream(substream_seed(master, index));
}

}  // namespace smia

#endif  // SMIA_RNG_HPP_
