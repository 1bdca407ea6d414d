#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ktsim {

// All stochastic operations take an explicit engine; nothing reads global state.
using SeedStream = std::mt19937_64;

// splitmix64 finalizer. Bijective on 64-bit words, so distinct inputs to a
// single mixing step never collide.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a parent seed and a path of stream labels.
inline std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(parent);
  for (std::uint64_t label : path) {
    h = mix64(h ^ mix64(label + 0x632be59bd9b4e019ULL));
  }
  return h;
}

inline SeedStream make_stream(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  return SeedStream{derive_seed(parent, path)};
}

inline bool bernoulli(SeedStream& rng, double p) {
  return std::bernoulli_distribution{p}(rng);
}

inline double uniform_real(SeedStream& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>{lo, hi}(rng);
}

inline std::size_t uniform_index(SeedStream& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>{0, n - 1}(rng);
}

}  // namespace ktsim
