#pragma once

#include <cstdint>

namespace ilv {

// Non-negative residue, also for negative a. C++ % truncates toward zero, so
// (-1) % 4 == -1; the address checks need the mathematical residue 3.
constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  std::int64_t r = a % b;
  return r < 0 ? r + b : r;
}

constexpr bool is_power_of_two(std::uint64_t x) { return x != 0 && (x & (x - 1)) == 0; }

constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

}  // namespace ilv
