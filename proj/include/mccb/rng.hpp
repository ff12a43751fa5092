#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace mccb {

// Counter-based random streams.
//
// Every draw is a pure function of (root seed, stream tag, up to three
// counters), obtained by folding the inputs through the SplitMix64
// finalizer. There is no shared generator state, so the order in which
// the environment or a policy asks for numbers cannot shift anyone
// else's draws, and any single draw can be replayed in isolation. The
// counters are conventionally (episode t, user n, slot i); 1-based ids
// are passed through as-is.

enum class Stream : std::uint64_t {
  context = 1,      // (t, n, i): coordinate i of user n's context in episode t
  click = 2,        // (t, n, h): absorption draw for user n at step h
  eps_explore = 3,  // (t, n, h): explore-vs-exploit coin of epsilon-greedy
  eps_arm = 4,      // (t, n, h): uniform arm pick when exploring
  theta_init = 5,   // (i): coordinate i of a sampled true parameter
  reward_init = 6,  // (k): sampled reward of arm k
};

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_bits(std::uint64_t seed, Stream s, std::uint64_t c0 = 0,
                                    std::uint64_t c1 = 0, std::uint64_t c2 = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(s));
  h = mix64(h ^ c0);
  h = mix64(h ^ c1);
  h = mix64(h ^ c2);
  return h;
}

// uniform on [0,1) with 53-bit resolution
inline double uniform01(std::uint64_t seed, Stream s, std::uint64_t c0 = 0,
                        std::uint64_t c1 = 0, std::uint64_t c2 = 0) {
  return static_cast<double>(stream_bits(seed, s, c0, c1, c2) >> 11) * 0x1.0p-53;
}

// standard normal via Box-Muller; coordinate i consumes counter slots 2i and 2i+1
inline double normal(std::uint64_t seed, Stream s, std::uint64_t c0, std::uint64_t c1,
                     std::uint64_t i) {
  const std::uint64_t lo = stream_bits(seed, s, c0, c1, 2 * i);
  const std::uint64_t hi = stream_bits(seed, s, c0, c1, 2 * i + 1);
  const double u1 = static_cast<double>((lo >> 11) + 1) * 0x1.0p-53;  // (0,1], keeps log finite
  const double u2 = static_cast<double>(hi >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mccb
