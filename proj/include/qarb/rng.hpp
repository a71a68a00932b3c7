#pragma once

#include <cstdint>
#include <random>

namespace qarb {

// splitmix64; used to derive independent sub-streams from one master seed
// so that parallel work items stay reproducible regardless of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Deterministic sub-seed for (work item `a`, sub-step `b`) under `master`.
inline std::uint64_t sub_seed(std::uint64_t master, std::uint64_t a,
                              std::uint64_t b = 0) {
  return splitmix64(splitmix64(master ^ splitmix64(a)) + b);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

}  // namespace qarb
