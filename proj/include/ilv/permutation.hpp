#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/rng.hpp"

namespace ilv {

// A validated permutation of [0, n). Construction checks bijectivity, so
// holding one is proof the mapping is invertible.
class Permutation {
 public:
  explicit Permutation(std::vector<std::uint32_t> values) : values_(std::move(values)) {
    std::vector<bool> seen(values_.size(), false);
    for (std::uint32_t v : values_) {
      if (v >= values_.size() || seen[v])
        throw ConsistencyError("not a permutation of [0, " +
                               std::to_string(values_.size()) + "): value " +
                               std::to_string(v) + " out of range or repeated");
      seen[v] = true;
    }
  }

  static Permutation identity(std::uint32_t n) {
    std::vector<std::uint32_t> v(n);
    for (std::uint32_t i = 0; i < n; ++i) v[i] = i;
    return Permutation(std::move(v));
  }

  static Permutation random(std::mt19937_64& g, std::uint32_t n) {
    return Permutation(random_perm_values(g, n));
  }

  std::uint32_t size() const { return static_cast<std::uint32_t>(values_.size()); }
  std::uint32_t operator[](std::uint64_t i) const { return values_[i]; }
  const std::vector<std::uint32_t>& values() const { return values_; }

  bool operator==(const Permutation& o) const { return values_ == o.values_; }

 private:
  std::vector<std::uint32_t> values_;
};

}  // namespace ilv
