#pragma once

#include <cstdint>
#include <random>

namespace orbitedge {

using Rng = std::mt19937_64;

// Independent sub-streams derived from one master seed. Each consumer
// (turbulence, execution time, GA, instance generation) asks for its own
// stream index so adding draws in one place never shifts another.
enum class Stream : std::uint64_t {
  kTurbulence = 1,
  kExecTime = 2,
  kGenetic = 3,
  kTargets = 4,
  kInstances = 5,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t replica = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ replica);
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t replica = 0) {
  return Rng(derive_seed(master, static_cast<std::uint64_t>(stream), replica));
}

// Uniform double in [0, 1) built from the raw 53 high bits. Unlike
// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace orbitedge
