#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vsr {

// All randomness in the library flows through named, seed-derived streams so
// that runs are reproducible regardless of thread scheduling: every consumer
// derives its own generator from (root seed, purpose tag, indices...).

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

namespace detail {
constexpr std::uint64_t seed_tag(std::uint64_t v) { return v; }
constexpr std::uint64_t seed_tag(std::string_view s) { return fnv1a64(s); }
constexpr std::uint64_t seed_tag(const char* s) { return fnv1a64(s); }
constexpr std::uint64_t seed_tag(int v) { return static_cast<std::uint64_t>(v); }
constexpr std::uint64_t seed_tag(long v) { return static_cast<std::uint64_t>(v); }
}  // namespace detail

// Combines a root seed with an arbitrary list of tags (integers or strings)
// into a well-mixed 64-bit stream seed.
template <class... Tags>
constexpr std::uint64_t mix_seed(std::uint64_t seed, Tags&&... tags) {
  std::uint64_t h = splitmix64(seed);
  ((h = splitmix64(h ^ detail::seed_tag(tags))), ...);
  return h;
}

template <class... Tags>
inline Rng make_stream(std::uint64_t seed, Tags&&... tags) {
  return Rng(mix_seed(seed, std::forward<Tags>(tags)...));
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {  // inclusive bounds
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace vsr
