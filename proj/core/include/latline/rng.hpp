#pragma once

#include <cstdint>

namespace latline {

// Counter-based randomness: every draw is a pure function of its key, so
// results do not depend on evaluation order or thread count.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Domain-separation tags for the independent streams.
enum class Stream : std::uint64_t {
  Positions = 0x706f73ULL,
  Edges = 0x656467ULL,
  Trials = 0x747269ULL,
  Coin = 0x636f69ULL,
  Sampling = 0x736d70ULL,
};

constexpr std::uint64_t mix_key(std::uint64_t seed, Stream stream, std::uint64_t a,
                                std::uint64_t b = 0) noexcept {
  std::uint64_t h = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b * 0xd6e8feb86659fd93ULL));
  return h;
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform_at(std::uint64_t seed, Stream stream, std::uint64_t a,
                         std::uint64_t b = 0) noexcept {
  return to_unit(mix_key(seed, stream, a, b));
}

/// Derives an independent child seed, e.g. one per trial.
constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                    std::uint64_t index) noexcept {
  return mix_key(seed, stream, index, 0x5eedULL);
}

}  // namespace latline
