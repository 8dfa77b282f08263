#pragma once

#include <cstdint>
#include <random>

namespace stasep {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One independent stream per (seed, sample index); reproducible under any
// parallel schedule.
inline std::mt19937_64 sample_stream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = splitmix64(seed ^ splitmix64(index + 0x51ed2701a9b3c48fULL));
  return std::mt19937_64(s);
}

}  // namespace stasep
