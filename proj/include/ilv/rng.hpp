#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ilv {

// splitmix64 finalizer; good avalanche, used only to mix seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named sub-streams so each table/purpose gets an independent generator and
// adding a draw in one place never shifts another's sequence.
enum class Stream : std::uint64_t {
  base_perm = 1,
  dither = 2,
  study_build = 3,
  dataset = 4,
  net_init = 5,
  shuffle = 6,
  junction = 7,
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, Stream kind,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(kind));
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

// mt19937_64 is fully specified by the standard, so sequences are identical
// across implementations. Distributions are not; the helpers below are.
inline std::mt19937_64 make_engine(std::uint64_t seed, Stream kind,
                                   std::uint64_t a = 0, std::uint64_t b = 0) {
  return std::mt19937_64(derive_seed(seed, kind, a, b));
}

// Unbiased draw from [0, n) by rejection.
inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
  std::uint64_t x = g();
  while (x < reject_below) x = g();
  return x % n;
}

// Uniform double in [0, 1).
inline double uniform_unit(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform_unit(g);
}

// Box-Muller; two uniforms per draw, no cached spare, so the stream position
// is a pure function of the draw count.
inline double gaussian(std::mt19937_64& g, double mean, double stddev) {
  double u1 = 1.0 - uniform_unit(g);  // (0, 1]
  double u2 = uniform_unit(g);
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + stddev * r * std::cos(6.283185307179586476925287 * u2);
}

// Fisher-Yates, backed by bounded() above for portability.
inline std::vector<std::uint32_t> random_perm_values(std::mt19937_64& g, std::uint32_t n) {
  std::vector<std::uint32_t> out(n);
  for (std::uint32_t i = 0; i < n; ++i) out[i] = i;
  for (std::uint32_t i = n; i > 1; --i) {
    std::uint64_t j = bounded(g, i);
    std::swap(out[i - 1], out[j]);
  }
  return out;
}

template <typename T>
inline void shuffle_values(std::mt19937_64& g, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::uint64_t j = bounded(g, i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace ilv
