#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace cmplab {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream tags keep independent purposes apart under one master seed.
enum class StreamTag : std::uint64_t {
  environment_sample = 1,
  reward = 2,
  cli_sample = 3,
};

/// Counter-based seed derivation: the seed of stream (tag, index) depends only
/// on the master seed and those two words, never on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed, StreamTag tag,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(master_seed ^ mix64(static_cast<std::uint64_t>(tag))) + index);
}

using RandomStream = std::mt19937_64;

inline RandomStream make_stream(std::uint64_t master_seed, StreamTag tag,
                                std::uint64_t index) {
  return RandomStream(derive_seed(master_seed, tag, index));
}

/// Uniform double in the open interval (0, 1) built from the top 53 bits.
/// Spelled out instead of std::uniform_real_distribution so that draws are
/// identical across standard library implementations.
inline double uniform_open01(RandomStream& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

/// Unit-rate exponential variate.
inline double unit_exponential(RandomStream& rng) { return -std::log(uniform_open01(rng)); }

}  // namespace cmplab
