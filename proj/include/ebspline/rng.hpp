#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ebs::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// Seed of an independent substream, e.g. (master, stream tag, replicate).
inline std::uint64_t substream(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return mix(mix(master, tag), index);
}

using Engine = std::mt19937_64;

inline Engine engine(std::uint64_t master, std::uint64_t tag, std::uint64_t index) {
  return Engine(substream(master, tag, index));
}

// Counter-based standard normal: the value depends only on (key, a, b), so
// callers can skip coordinates without desynchronising other draws.
inline double counter_normal(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h1 = mix(mix(key, a), b);
  const std::uint64_t h2 = splitmix64(h1);
  const double u1 = (static_cast<double>(h1 >> 11) + 0.5) * 0x1.0p-53;
  const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Stream tags. Keeping them in one place avoids accidental reuse.
enum Tag : std::uint64_t {
  kNoise = 1,
  kNoiseSecond = 2,
  kRadius = 3,
  kPosterior = 4,
  kChiSquare = 5,
};

}  // namespace ebs::rng
