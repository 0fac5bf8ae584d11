#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <utility>
#include <vector>

#include "ilv/errors.hpp"
#include "ilv/interleaver.hpp"
#include "ilv/permutation.hpp"

namespace ilv {

// Minimum over index pairs of |i-j| mod N + |pi(i)-pi(j)| mod N. Both terms
// are already below N, so the mods are identities; kept for fidelity to the
// definition. Lower bound 2, reached by e.g. any adjacent fixed points.
inline std::uint64_t spread(const Permutation& p) {
  std::uint64_t n = p.size();
  if (n < 2) throw MetricError("spread needs at least two elements");
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t i = 0; i + 1 < n && best > 2; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      std::uint64_t di = (j - i) % n;
      std::uint64_t dp = static_cast<std::uint64_t>(
                             std::llabs(static_cast<std::int64_t>(p[j]) -
                                        static_cast<std::int64_t>(p[i]))) % n;
      std::uint64_t v = di + dp;
      if (v < best) best = v;
      if (best == 2) break;
    }
  }
  return best;
}

// Alternative reading with wrap-around distance on both axes; not used by
// the standard reports.
inline std::uint64_t spread_circular(const Permutation& p) {
  std::uint64_t n = p.size();
  if (n < 2) throw MetricError("spread needs at least two elements");
  auto circ = [n](std::uint64_t d) { return std::min(d, n - d); };
  std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t i = 0; i + 1 < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      std::uint64_t di = circ(j - i);
      std::uint64_t dp = circ(static_cast<std::uint64_t>(
          std::llabs(static_cast<std::int64_t>(p[j]) - static_cast<std::int64_t>(p[i]))));
      best = std::min(best, di + dp);
    }
  }
  return best;
}

namespace detail {
// Displacement pairs packed into one word: (j-i) in the high half (always
// positive for i<j), pi(j)-pi(i) two's-complement in the low half.
inline std::vector<std::uint64_t> packed_pairs(const Permutation& p) {
  std::uint64_t n = p.size();
  std::vector<std::uint64_t> keys;
  keys.reserve(n * (n - 1) / 2);
  for (std::uint64_t i = 0; i + 1 < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      std::int64_t dp = static_cast<std::int64_t>(p[j]) - static_cast<std::int64_t>(p[i]);
      keys.push_back((j - i) << 32 | (static_cast<std::uint64_t>(dp) & 0xffffffffu));
    }
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}
}  // namespace detail

// Distinct displacement pairs {(j-i, pi(j)-pi(i)) : i < j}, sorted
// lexicographically. The packed keys order negative image differences after
// positive ones, so a real sort is needed here.
inline std::vector<std::pair<std::int64_t, std::int64_t>> pair_set(const Permutation& p) {
  if (p.size() < 2) throw MetricError("pair set needs at least two elements");
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::uint64_t key : detail::packed_pairs(p)) {
    std::int64_t dx = static_cast<std::int64_t>(key >> 32);
    std::int64_t dp = static_cast<std::int32_t>(key & 0xffffffffu);
    out.emplace_back(dx, dp);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// |pair set| normalized by the unordered pair count N(N-1)/2; 1.0 means every
// pair's displacement is unique.
inline double dispersion(const Permutation& p) {
  std::uint64_t n = p.size();
  if (n < 2) throw MetricError("dispersion needs at least two elements");
  double total = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  return static_cast<double>(detail::packed_pairs(p).size()) / total;
}

struct MetricsReport {
  std::uint32_t size = 0;
  std::uint64_t spread = 0;
  std::uint64_t pair_set_size = 0;
  double dispersion = 0.0;
};

inline MetricsReport analyze(const Permutation& p) {
  MetricsReport r;
  r.size = p.size();
  r.spread = spread(p);
  r.pair_set_size = detail::packed_pairs(p).size();
  double total = 0.5 * static_cast<double>(r.size) * static_cast<double>(r.size - 1);
  r.dispersion = static_cast<double>(r.pair_set_size) / total;
  return r;
}

// One row of the variant comparison: mean spread/dispersion of the weight
// and activation interleavers over seeded rebuilds.
struct VariantMetrics {
  VariantSet variants;
  bool applicable = false;
  std::string skip_reason;
  double pw_spread = std::numeric_limits<double>::quiet_NaN();
  double pa_spread = std::numeric_limits<double>::quiet_NaN();
  double pw_dispersion = std::numeric_limits<double>::quiet_NaN();
  double pa_dispersion = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<VariantMetrics> variant_metrics_study(
    const JunctionConfig& config, const std::vector<VariantSet>& variants,
    std::uint32_t iterations, std::uint64_t master_seed) {
  if (iterations == 0) throw ConfigError("iterations must be positive");
  std::vector<VariantMetrics> rows;
  for (const VariantSet& vs : variants) {
    VariantMetrics row;
    row.variants = vs;
    row.skip_reason = vs.applicability_issue(config);
    row.applicable = row.skip_reason.empty();
    if (row.applicable) {
      double sw = 0, sa = 0, dw = 0, da = 0;
      for (std::uint32_t it = 0; it < iterations; ++it) {
        std::uint64_t seed = derive_seed(master_seed, Stream::study_build, vs.bits(), it);
        InterleaverBuild build = InterleaverBuild::generate(config, vs, seed);
        Permutation pw = build.weight_permutation();
        Permutation pa = build.activation_permutation(0);
        sw += static_cast<double>(spread(pw));
        sa += static_cast<double>(spread(pa));
        dw += dispersion(pw);
        da += dispersion(pa);
      }
      row.pw_spread = sw / iterations;
      row.pa_spread = sa / iterations;
      row.pw_dispersion = dw / iterations;
      row.pa_dispersion = da / iterations;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ilv
